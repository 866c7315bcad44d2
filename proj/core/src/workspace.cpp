#include "nrcq/workspace.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nrcq {

namespace {

using Json = nlohmann::ordered_json;

BaseType parse_base_type(const std::string& s, const std::string& where) {
  if (s == "Int") return BaseType::Int;
  if (s == "Bool") return BaseType::Bool;
  if (s == "String") return BaseType::String;
  throw WorkspaceError("unknown base type '" + s + "' in " + where);
}

KValue parse_cell(const std::string& raw, BaseType ty, const std::string& where) {
  switch (ty) {
    case BaseType::Int:
      try {
        return KValue::integer(std::stoll(raw));
      } catch (...) {
        throw WorkspaceError("bad integer '" + raw + "' in " + where);
      }
    case BaseType::Bool:
      if (raw == "true" || raw == "1") return KValue::boolean(true);
      if (raw == "false" || raw == "0") return KValue::boolean(false);
      throw WorkspaceError("bad boolean '" + raw + "' in " + where);
    case BaseType::String:
      return KValue::string(raw);
  }
  throw WorkspaceError("unreachable");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

KValue load_csv(const std::string& path, const Type& row_type) {
  std::ifstream in(path);
  if (!in) throw WorkspaceError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw WorkspaceError(path + " is missing its header row");
  std::vector<std::string> header = split_csv_line(line);
  std::vector<BaseType> col_types;
  for (const auto& col : header) {
    const Type* ft = row_type.field(col);
    if (!ft)
      throw WorkspaceError(path + ": column '" + col + "' is not in the table schema");
    col_types.push_back(ft->base_type());
  }
  if (header.size() != row_type.fields().size())
    throw WorkspaceError(path + ": header does not cover the table schema");
  std::vector<KValue::Entry> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw WorkspaceError(path + ": row " + std::to_string(lineno) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(header.size()));
    std::vector<std::pair<std::string, KValue>> fields;
    for (size_t i = 0; i < cells.size(); ++i)
      fields.emplace_back(header[i],
                          parse_cell(cells[i], col_types[i],
                                     path + ":" + std::to_string(lineno)));
    rows.emplace_back(KValue::record(std::move(fields)), 1);
  }
  return KValue::bag(std::move(rows));
}

KValue load_json_rows(const std::string& path, const Type& row_type) {
  std::ifstream in(path);
  if (!in) throw WorkspaceError("cannot open " + path);
  Json data = Json::parse(in, nullptr, true, true);
  if (!data.is_array()) throw WorkspaceError(path + ": expected an array of row objects");
  std::vector<KValue::Entry> rows;
  int i = 0;
  for (const auto& row : data) {
    ++i;
    std::string where = path + " row " + std::to_string(i);
    if (!row.is_object()) throw WorkspaceError(where + " is not an object");
    std::vector<std::pair<std::string, KValue>> fields;
    for (const auto& [l, ft] : row_type.fields()) {
      if (!row.contains(l)) throw WorkspaceError(where + " misses field " + l);
      const auto& v = row.at(l);
      switch (ft.base_type()) {
        case BaseType::Int:
          if (!v.is_number_integer()) throw WorkspaceError(where + ": " + l + " not an int");
          fields.emplace_back(l, KValue::integer(v.get<std::int64_t>()));
          break;
        case BaseType::Bool:
          if (!v.is_boolean()) throw WorkspaceError(where + ": " + l + " not a bool");
          fields.emplace_back(l, KValue::boolean(v.get<bool>()));
          break;
        case BaseType::String:
          if (!v.is_string()) throw WorkspaceError(where + ": " + l + " not a string");
          fields.emplace_back(l, KValue::string(v.get<std::string>()));
          break;
      }
    }
    rows.emplace_back(KValue::record(std::move(fields)), 1);
  }
  return KValue::bag(std::move(rows));
}

}  // namespace

Signature load_signature(const std::string& schema_path) {
  std::ifstream in(schema_path);
  if (!in) throw WorkspaceError("cannot open schema " + schema_path);
  Json data = Json::parse(in, nullptr, true, true);
  Signature sig;
  if (data.contains("tables")) {
    for (const auto& [name, fields] : data.at("tables").items()) {
      std::vector<std::pair<std::string, Type>> fs;
      for (const auto& [fname, fty] : fields.items())
        fs.emplace_back(fname, Type::base(parse_base_type(
                                   fty.get<std::string>(), "table " + name)));
      sig.add_table(name, Type::record(std::move(fs)));
    }
  }
  if (data.contains("prims")) {
    for (const auto& [name, ps] : data.at("prims").items()) {
      PrimSig p;
      for (const auto& a : ps.at("args"))
        p.args.push_back(parse_base_type(a.get<std::string>(), "prim " + name));
      p.result = parse_base_type(ps.at("result").get<std::string>(), "prim " + name);
      sig.add_prim(name, p);
    }
  }
  return sig;
}

TableStore load_tables(const Signature& sig, const std::string& data_dir) {
  TableStore store;
  for (const auto& [name, row] : sig.tables()) {
    std::filesystem::path csv = std::filesystem::path(data_dir) / (name + ".csv");
    std::filesystem::path json = std::filesystem::path(data_dir) / (name + ".json");
    if (std::filesystem::exists(csv)) {
      store[name] = load_csv(csv.string(), row);
    } else if (std::filesystem::exists(json)) {
      store[name] = load_json_rows(json.string(), row);
    } else {
      throw WorkspaceError("no data file for table " + name + " under " + data_dir);
    }
  }
  return store;
}

Workspace load_workspace(const std::string& schema_path, const std::string& data_dir) {
  Workspace ws;
  ws.sig = load_signature(schema_path);
  ws.store = load_tables(ws.sig, data_dir);
  return ws;
}

}  // namespace nrcq

#include "tpk/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tpk/error.hpp"

namespace tpk {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path);
  out << text;
  if (!out) throw DomainError("write failed: " + path);
}

std::string curve_to_json(const ClosedCurve& curve) {
  json j;
  j["dim"] = curve.dim();
  j["derivative_rule"] = curve.rule() == DerivativeRule::spectral ? "spectral" : "central_difference";
  json samples = json::array();
  for (int r = 0; r < curve.size(); ++r) {
    json row = json::array();
    for (int c = 0; c < curve.dim(); ++c) row.push_back(curve.samples()(r, c));
    samples.push_back(std::move(row));
  }
  j["samples"] = std::move(samples);
  return j.dump() + "\n";
}

ClosedCurve curve_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(std::string("curve file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("dim") || !j.contains("samples"))
    throw DomainError("curve file: expected an object with dim and samples");
  if (!j["dim"].is_number_integer()) throw DomainError("curve file: dim must be an integer");
  const int dim = j["dim"].get<int>();
  const json& samples = j["samples"];
  if (!samples.is_array()) throw DomainError("curve file: samples must be an array");
  DerivativeRule rule = DerivativeRule::spectral;
  if (j.contains("derivative_rule")) {
    std::string r = j["derivative_rule"].is_string() ? j["derivative_rule"].get<std::string>() : "";
    if (r == "central_difference")
      rule = DerivativeRule::central_difference;
    else if (r != "spectral")
      throw DomainError("curve file: unknown derivative_rule");
  }
  Points pts(samples.size(), std::max(dim, 0));
  for (std::size_t r = 0; r < samples.size(); ++r) {
    const json& row = samples[r];
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw DomainError("curve file: sample " + std::to_string(r) + " does not have dim coordinates");
    for (int c = 0; c < dim; ++c) {
      if (!row[c].is_number()) throw DomainError("curve file: non-numeric coordinate");
      pts(r, c) = row[c].get<double>();
    }
  }
  return ClosedCurve(std::move(pts), rule);
}

void write_curve(const ClosedCurve& curve, const std::string& path) { write_text(path, curve_to_json(curve)); }

ClosedCurve read_curve(const std::string& path) { return curve_from_json(read_text(path)); }

std::string table_to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.header.size(); ++c) out += (c ? "," : "") + table.header[c];
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_double(row[c]);
    out += "\n";
  }
  return out;
}

Table table_from_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    return parts;
  };
  if (!std::getline(in, line)) throw DomainError("csv: empty input");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto parts = split(line);
    if (parts.size() != t.header.size()) throw DomainError("csv: row width differs from header");
    std::vector<double> row;
    for (const auto& p : parts) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(p, &used));
        if (used != p.size()) throw DomainError("csv: bad number " + p);
      } catch (const std::logic_error&) {
        // stod rejects inf/nan spellings on some platforms
        if (p == "inf") row.push_back(INFINITY);
        else if (p == "-inf") row.push_back(-INFINITY);
        else if (p == "nan") row.push_back(NAN);
        else throw DomainError("csv: bad number " + p);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string trace_to_csv(const std::vector<TraceRow>& rows) {
  Table t{{"iter", "energy", "length", "grad_norm", "lambda", "min_dist", "bilip", "step"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({double(r.iter), r.energy, r.length, r.grad_norm, r.lambda, r.min_dist, r.bilip, r.step});
  return table_to_csv(t);
}

std::vector<TraceRow> trace_from_csv(const std::string& text) {
  Table t = table_from_csv(text);
  const std::vector<std::string> expected{"iter", "energy", "length", "grad_norm", "lambda", "min_dist", "bilip", "step"};
  if (t.header != expected) throw DomainError("trace csv: unexpected header");
  std::vector<TraceRow> rows;
  for (const auto& r : t.rows)
    rows.push_back({static_cast<int>(r[0]), r[1], r[2], r[3], r[4], r[5], r[6], r[7]});
  return rows;
}

std::string RunConfig::to_text() const {
  json j;
  j["command"] = command;
  j["p"] = p;
  j["q"] = q;
  j["nodes"] = nodes;
  j["seed"] = seed;
  j["out"] = out;
  j["threads"] = threads;
  json opts = json::array();
  for (const auto& [k, v] : options) opts.push_back(json::array({k, v}));
  j["options"] = opts;
  return j.dump(2) + "\n";
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig c;
  try {
    json j = json::parse(text);
    c.command = j.at("command").get<std::string>();
    c.p = j.at("p").get<double>();
    c.q = j.at("q").get<double>();
    c.nodes = j.at("nodes").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.out = j.at("out").get<std::string>();
    c.threads = j.at("threads").get<int>();
    for (const auto& kv : j.at("options")) c.options.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
  } catch (const json::exception& e) {
    throw DomainError(std::string("run config: ") + e.what());
  }
  return c;
}

}  // namespace tpk

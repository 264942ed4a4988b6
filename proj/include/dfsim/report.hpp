#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfsim/branch.hpp"
#include "dfsim/protocols.hpp"
#include "dfsim/verify.hpp"

namespace dfsim {

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const cx& z) { return ordered_json::array({z.real(), z.imag()}); }

inline ordered_json to_json(const std::vector<cx>& v) {
  ordered_json arr = ordered_json::array();
  for (const cx& z : v) arr.push_back(to_json(z));
  return arr;
}

inline ordered_json to_json(const MeasurementRecord& rec) {
  ordered_json arr = ordered_json::array();
  for (const MeasurementEntry& e : rec.entries) {
    ordered_json o;
    o["block"] = e.block;
    o["outcome"] = e.outcome;
    o["probability"] = e.probability;
    arr.push_back(std::move(o));
  }
  return arr;
}

inline ordered_json to_json(const std::vector<AppliedCorrection>& cs) {
  ordered_json arr = ordered_json::array();
  for (const AppliedCorrection& c : cs) {
    ordered_json o;
    o["op"] = c.op;
    o["qubit"] = c.target;
    arr.push_back(std::move(o));
  }
  return arr;
}

inline ordered_json to_json(const ContractCheck& c) {
  ordered_json o;
  o["contract"] = c.contract;
  o["draws"] = c.draws;
  o["min_fidelity"] = c.min_fidelity;
  o["pass"] = c.pass;
  if (!c.pass) {
    o["worst_expected"] = to_json(c.worst_expected);
    o["worst_actual"] = to_json(c.worst_actual);
  }
  return o;
}

inline ordered_json to_json(const TableCellCheck& c) {
  ordered_json o;
  o["parity_control"] = c.parity_control;
  o["parity_target"] = c.parity_target;
  o["dressed"] = c.dressed;
  o["draws"] = c.draws;
  o["min_fidelity"] = c.min_fidelity;
  o["pass"] = c.pass;
  return o;
}

inline ordered_json to_json(const VerifyReport& rep) {
  ordered_json o;
  o["pass"] = rep.pass;
  ordered_json contracts = ordered_json::array();
  for (const ContractCheck& c : rep.contracts) contracts.push_back(to_json(c));
  o["contracts"] = std::move(contracts);
  ordered_json table = ordered_json::array();
  for (const TableCellCheck& c : rep.table) table.push_back(to_json(c));
  o["correction_table"] = std::move(table);
  return o;
}

// One row of a noise benchmark: a state preparation against a noise channel,
// summarized by the sample mean of the surviving metric.
struct BenchRow {
  std::string label;
  std::string encoding;  // "dfs" or "bare"
  std::string channel;   // "uniform", "fixed", "gaussian", or "error:<kind>"
  double parameter = 0.0;
  std::string metric;  // "fidelity" or "dfs-weight"
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

inline ordered_json to_json(const BenchRow& r) {
  ordered_json o;
  o["label"] = r.label;
  o["encoding"] = r.encoding;
  o["channel"] = r.channel;
  o["parameter"] = r.parameter;
  o["metric"] = r.metric;
  o["mean"] = r.mean;
  o["std_error"] = r.std_error;
  o["samples"] = r.samples;
  return o;
}

inline std::string csv_escape(const std::string& s) {
  bool needs = false;
  for (char c : s)
    if (c == ',' || c == '"' || c == '\n') needs = true;
  if (!needs) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "label,encoding,channel,parameter,metric,mean,std_error,samples\n";
  char buf[64];
  for (const BenchRow& r : rows) {
    os << csv_escape(r.label) << ',' << csv_escape(r.encoding) << ','
       << csv_escape(r.channel) << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.parameter);
    os << buf << ',' << csv_escape(r.metric) << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.mean);
    os << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.std_error);
    os << buf << ',' << r.samples << '\n';
  }
}

}  // namespace dfsim

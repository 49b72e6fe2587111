// Copyright (c) 2026 rejsamp contributors
// SPDX-License-Identifier: Apache-2.0
#include "report_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rejsamp::cli {

void write_report(const RunOutcome& o, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  nlohmann::json j = nlohmann::json::parse(o.result.report.to_json());
  if (o.builtin) {
    j["target"] = {{"family", family_name(o.spec.family)},
                   {"a", o.spec.a},
                   {"d", o.spec.d},
                   {"r", o.spec.r}};
  }
  if (o.dist_tested) {
    j["distributional_test"] = {{"method", o.dist_test.method},
                                {"statistic", o.dist_test.statistic},
                                {"p_value", o.dist_test.p_value},
                                {"n1", o.dist_test.n1},
                                {"n2", o.dist_test.n2}};
  }
  std::ofstream out(out_dir + "/report.json");
  out << j.dump(2) << "\n";
}

void write_samples(const RunResult& r, const std::string& out_dir, const std::string& format) {
  std::filesystem::create_directories(out_dir);
  const std::size_t n = r.dims == 0 ? 0 : r.samples.size() / r.dims;
  if (format == "f64le") {
    std::ofstream out(out_dir + "/samples.f64le", std::ios::binary);
    out.write(reinterpret_cast<const char*>(r.samples.data()),
              static_cast<std::streamsize>(r.samples.size() * sizeof(double)));
    return;
  }
  std::ofstream out(out_dir + "/samples.csv");
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    std::string line;
    for (std::size_t k = 0; k < r.dims; ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", r.samples[i * r.dims + k]);
      if (k) line += ',';
      line += buf;
    }
    out << line << "\n";
  }
}

std::string csv_header() {
  return "suite,family,a,d,r,T,run,seed,ok,acceptance_rate,f_evals,accepted_total,epochs,"
         "audit_pass,test_method,test_p,wall_time_s,error";
}

std::string csv_row(const RunOutcome& o, const std::string& suite, int run_index, bool ok,
                    const std::string& error) {
  std::ostringstream os;
  os.precision(17);
  const RunReport& rep = o.result.report;
  os << suite << ',' << (o.builtin ? family_name(o.spec.family) : "plugin") << ',' << o.spec.a
     << ',' << o.spec.d << ',' << o.spec.r << ',' << rep.config.T << ',' << run_index << ','
     << rep.config.seed << ',' << (ok ? 1 : 0) << ',';
  if (ok) {
    os << rep.acceptance_rate << ',' << rep.f_evals << ',' << rep.accepted_total << ','
       << rep.epochs.size() << ',' << (rep.audit.pass() ? 1 : 0) << ',';
    if (o.dist_tested)
      os << o.dist_test.method << ',' << o.dist_test.p_value << ',';
    else
      os << ",,";
    os << rep.wall_time_s << ',';
  } else {
    os << ",,,,,,,,";
  }
  os << '"' << error << '"';
  return os.str();
}

}  // namespace rejsamp::cli

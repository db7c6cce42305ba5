#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "json.hpp"
#include "nld/scenario.hpp"

namespace nld {

namespace {

using ojson = nlohmann::ordered_json;

ojson number(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

ojson run_json(const RunSummary& s) {
  ojson j;
  j["name"] = s.name;
  j["hash"] = s.hash;
  j["system"] = s.system;
  j["model"] = s.model;
  j["samples"] = s.series.rows.size();
  j["charge_drift"] = number(s.charge_drift);
  j["energy_drift"] = number(s.energy_drift);
  ojson v = ojson::array();
  for (const auto& r : s.virials)
    v.push_back({{"id", r.id},
                 {"pass", r.pass},
                 {"max_defect", number(r.max_defect)},
                 {"max_rhs", number(r.max_rhs)},
                 {"atol", number(r.atol)},
                 {"rtol", r.rtol}});
  j["virials"] = v;
  ojson m = ojson::object();
  for (const auto& x : s.metrics) m[x.name] = number(x.value);
  j["metrics"] = m;
  ojson c = ojson::array();
  for (const auto& x : s.checks) c.push_back({{"name", x.name}, {"pass", x.pass}, {"known", x.known}, {"detail", x.detail}});
  j["checks"] = c;
  return j;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::string cell(double x) { return fmt::format("{}", x); }

}  // namespace

std::string summary_json(const RunSummary& s) { return run_json(s).dump(2); }

std::string summary_json(const ExperimentSummary& s) {
  ojson j;
  j["name"] = s.name;
  j["pass"] = s.pass();
  j["only_known_failures"] = s.only_known_failures();
  ojson runs = ojson::array();
  for (const auto& r : s.runs) runs.push_back(run_json(r));
  j["runs"] = runs;
  ojson m = ojson::object();
  for (const auto& x : s.metrics) m[x.name] = number(x.value);
  j["metrics"] = m;
  ojson c = ojson::array();
  for (const auto& x : s.checks) c.push_back({{"name", x.name}, {"pass", x.pass}, {"known", x.known}, {"detail", x.detail}});
  j["checks"] = c;
  return j.dump(2);
}

void write_series_csv(const std::string& path, const Table& t) {
  auto out = open_out(path);
  for (size_t k = 0; k < t.columns.size(); ++k) out << (k ? "," : "") << t.columns[k];
  out << "\n";
  for (const auto& row : t.rows) {
    for (size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << cell(row[k]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_virials_csv(const std::string& path, const std::vector<VirialReport>& reports) {
  auto out = open_out(path);
  out << "id,t,F,FD,RHS,defect\n";
  for (const auto& r : reports)
    for (size_t k = 0; k < r.times.size(); ++k)
      out << r.id << "," << cell(r.times[k]) << "," << cell(r.F[k]) << "," << cell(r.FD[k]) << "," << cell(r.RHS[k])
          << "," << cell(r.defect[k]) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

const char* kPlotScript = R"(import csv
import math
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
RUNS = [{runs}]


def read(path):
    with open(path) as f:
        rows = list(csv.reader(f))
    head, body = rows[0], rows[1:]
    return {{h: [float(r[k]) for r in body] for k, h in enumerate(head)}}


def read_virials(path):
    out = {{}}
    with open(path) as f:
        for row in csv.DictReader(f):
            out.setdefault(row["id"], ([], []))
            out[row["id"]][0].append(float(row["t"]))
            out[row["id"]][1].append(abs(float(row["defect"])))
    return out


def positive(ts, ys):
    pts = [(t, y) for t, y in zip(ts, ys) if t > 0 and math.isfinite(y) and y > 0]
    return [p[0] for p in pts], [p[1] for p in pts]


fig, axes = plt.subplots(1, 3, figsize=(15, 4.5))
for run in RUNS:
    data = read(os.path.join(HERE, run + ".csv"))
    for col, ys in data.items():
        if col.startswith("mass_"):
            axes[0].loglog(*positive(data["t"], ys), label=run + ":" + col)
        if col.startswith("cum_"):
            ts = [t for t, y in zip(data["t"], ys) if math.isfinite(y)]
            axes[2].plot(ts, [y for y in ys if math.isfinite(y)], label=run + ":" + col)
    vpath = os.path.join(HERE, run + "_virials.csv")
    if os.path.exists(vpath):
        for vid, (ts, ds) in read_virials(vpath).items():
            axes[1].semilogy(*positive(ts, ds), label=run + ":" + vid)
axes[0].set(title="windowed mass", xlabel="t", ylabel="mass")
axes[1].set(title="virial defect |dF/dt - RHS|", xlabel="t")
axes[2].set(title="cumulative integrals", xlabel="t")
for ax in axes:
    if ax.lines:
        ax.legend(fontsize=7)
fig.tight_layout()
out = os.path.join(HERE, "{name}.png")
fig.savefig(out, dpi=120)
print(out)
)";

}  // namespace

std::vector<std::string> emit_plots(const ExperimentSummary& s, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  std::vector<std::string> written;
  std::string runs;
  for (const auto& r : s.runs) {
    const std::string csv = (d / (r.name + ".csv")).string();
    const std::string vcsv = (d / (r.name + "_virials.csv")).string();
    write_series_csv(csv, r.series);
    write_virials_csv(vcsv, r.virials);
    written.push_back(csv);
    written.push_back(vcsv);
    runs += fmt::format("{}\"{}\"", runs.empty() ? "" : ", ", r.name);
  }
  const std::string script = (d / (s.name + "_plot.py")).string();
  auto out = open_out(script);
  out << fmt::format(fmt::runtime(kPlotScript), fmt::arg("runs", runs), fmt::arg("name", s.name));
  if (!out) throw std::runtime_error("write failed: " + script);
  written.push_back(script);
  return written;
}

}  // namespace nld

#include "bolab/report.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace bolab {

bool Report::all_passed() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

const Table* Report::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

nlohmann::json Report::body_json() const {
  nlohmann::json j;
  j["experiment_id"] = experiment_id;
  j["config_hash"] = config_hash(params);
  j["params"] = params;
  auto tabs = nlohmann::json::array();
  for (const auto& t : tables) {
    nlohmann::json tj;
    tj["name"] = t.name;
    tj["columns"] = t.columns;
    tj["rows"] = t.rows;
    tabs.push_back(tj);
  }
  j["tables"] = tabs;
  nlohmann::json fj = nlohmann::json::object();
  for (const auto& [name, f] : fits)
    fj[name] = {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
  j["fits"] = fj;
  auto vj = nlohmann::json::array();
  for (const auto& v : verdicts)
    vj.push_back({{"criterion", v.criterion},
                  {"pass", v.pass},
                  {"measured", v.measured},
                  {"threshold", v.threshold},
                  {"note", v.note}});
  j["verdicts"] = vj;
  return j;
}

Fit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  Fit f;
  const double den = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double fit = f.slope * x[i] + f.intercept;
    ss_res += (y[i] - fit) * (y[i] - fit);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

Fit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0 || y[i] <= 0) throw std::invalid_argument("log-log fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_linear(lx, ly);
}

uint64_t fnv1a(const std::string& text) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const nlohmann::json& params) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(params.dump())));
  return buf;
}

EmittedPaths emit_report(const Report& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  EmittedPaths paths;
  const std::string hash = config_hash(report.params);

  auto write_file = [&](const std::string& name, const std::string& body) {
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
    return path;
  };

  paths.report_json = write_file("report.json", report.body_json().dump(2) + "\n");
  {
    nlohmann::json meta;
    meta["runtime_seconds"] = report.runtime_seconds;
    meta["timestamp_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    paths.meta_json = write_file("meta.json", meta.dump(2) + "\n");
  }

  for (const auto& t : report.tables) {
    std::string csv = "# config " + hash + "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c) csv += (c ? "," : "") + t.columns[c];
    csv += "\n";
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", row[c]);
        csv += (c ? "," : "") + std::string(buf);
      }
      csv += "\n";
    }
    paths.csv_files.push_back(write_file(t.name + ".csv", csv));
  }

  {
    std::string gp = "# config " + hash + "\nset datafile separator ','\nset key outside\n";
    for (const auto& t : report.tables) {
      if (t.columns.size() < 2) continue;
      gp += "set output '" + t.name + ".png'\nset terminal pngcairo\n";
      gp += "plot '" + t.name + ".csv' skip 2 using 1:2 with linespoints title '" + t.name + "'";
      for (const auto& [name, f] : report.fits) {
        if (name.rfind(t.name, 0) == 0)
          gp += ", exp(" + std::to_string(f.intercept) + ") * x**(" + std::to_string(f.slope) +
                ") title '" + name + " fit'";
      }
      gp += "\n";
    }
    paths.plot_script = write_file("plot.gp", gp);
  }
  return paths;
}

}  // namespace bolab

#include "minsurf/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "minsurf/convergence.hpp"
#include "minsurf/error.hpp"

namespace minsurf {

std::string to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::at_most: return "at_most";
    case CheckKind::at_least: return "at_least";
    case CheckKind::order: return "order";
    case CheckKind::non_decaying: return "non_decaying";
    case CheckKind::below: return "below";
  }
  return "unknown";
}

Check evaluate_check(std::string name, std::string anchor, const std::string& metric, CheckKind kind,
                     double threshold, const std::vector<ResolutionAnalysis>& runs) {
  Check c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  c.metric = metric;
  c.kind = kind;
  c.threshold = threshold;
  std::vector<double> h;
  for (const ResolutionAnalysis& run : runs) {
    if (!run.metrics.has(metric)) {
      c.pass = false;
      c.note = "metric " + metric + " missing at resolution " + std::to_string(run.resolution);
      return c;
    }
    c.values.push_back(run.metrics.get(metric));
    h.push_back(run.h);
  }
  if (c.values.empty()) {
    c.note = "no resolutions";
    return c;
  }
  auto all = [&](auto pred) {
    for (double x : c.values) {
      if (!pred(x)) return false;
    }
    return true;
  };
  switch (kind) {
    case CheckKind::at_most:
      c.pass = all([&](double x) { return x <= threshold; });
      break;
    case CheckKind::at_least:
      c.pass = all([&](double x) { return x >= threshold; });
      break;
    case CheckKind::below:
      c.pass = all([&](double x) { return x < threshold; });
      break;
    case CheckKind::order: {
      if (c.values.size() < 2) {
        c.note = "needs two resolutions";
        return c;
      }
      const OrderAssessment a = assess_order(h, c.values, threshold);
      c.order = a.order;
      c.pass = a.pass;
      if (a.at_floor) c.note = "at round-off floor";
      break;
    }
    case CheckKind::non_decaying: {
      if (c.values.size() < 2) {
        c.note = "needs two resolutions";
        return c;
      }
      c.order = fitted_order(h, c.values);
      c.pass = non_decaying(c.values[c.values.size() - 2], c.values.back(), threshold);
      break;
    }
  }
  return c;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << value;
  return os.str();
}

namespace {

Json number(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

}  // namespace

Json check_to_json(const Check& c) {
  Json j;
  j["name"] = c.name;
  j["anchor"] = c.anchor;
  j["metric"] = c.metric;
  j["kind"] = to_string(c.kind);
  j["threshold"] = c.threshold;
  Json values = Json::array();
  for (double x : c.values) values.push_back(number(x));
  j["values"] = values;
  j["order"] = c.order ? number(*c.order) : Json(nullptr);
  j["pass"] = c.pass;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

Json resolution_to_json(const ResolutionAnalysis& run) {
  Json j;
  j["resolution"] = run.resolution;
  j["h"] = run.h;
  Json metrics = Json::object();
  for (const auto& [k, v] : run.metrics.entries()) metrics[k] = number(v);
  j["metrics"] = metrics;
  Json labels = Json::object();
  for (const auto& [k, v] : run.labels) labels[k] = v;
  j["labels"] = labels;
  return j;
}

std::string report_body(const Json& report) {
  Json body = report;
  body.erase("run");
  return body.dump(2) + "\n";
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string fields_csv(const FieldTable& table) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "u,v";
  for (const std::string& name : table.names) os << ',' << name;
  os << '\n';
  const ChartDomain& d = table.domain;
  for (int j = 0; j < d.nv; ++j) {
    for (int i = 0; i < d.nu; ++i) {
      os << d.u(i) << ',' << d.v(j);
      const std::size_t idx = static_cast<std::size_t>(j) * d.nu + i;
      for (const auto& col : table.columns) {
        os << ',';
        if (std::isfinite(col[idx])) {
          os << col[idx];
        } else {
          os << "nan";
        }
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace minsurf

#include "simcurv/grid.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "simcurv/error.hpp"

namespace simcurv {
namespace {

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidArgument("grid: bad number '" + std::string(s) + "' in " + std::string(what));
  return v;
}

int parse_count(std::string_view s, std::string_view what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidArgument("grid: bad node count '" + std::string(s) + "' in " + std::string(what));
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace

double GridAxis::value(int i) const {
  if (count == 1) return start;
  if (i == count - 1) return end;
  return start + (end - start) * static_cast<double>(i) / static_cast<double>(count - 1);
}

GridSpec GridSpec::parse(std::string_view text) {
  GridSpec spec;
  if (text.empty()) throw InvalidArgument("grid: empty specification");
  for (auto item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw InvalidArgument("grid: expected name=start:end:count, got '" + std::string(item) + "'");
    const auto parts = split(item.substr(eq + 1), ':');
    if (parts.size() != 3)
      throw InvalidArgument("grid: expected start:end:count in '" + std::string(item) + "'");
    spec.axes.push_back({std::string(item.substr(0, eq)), parse_double(parts[0], item),
                         parse_double(parts[1], item), parse_count(parts[2], item)});
  }
  spec.validate();
  return spec;
}

GridSpec GridSpec::uniform(int k, double t0, double t1, int nt, double x0, double x1, int nx) {
  GridSpec spec;
  spec.axes.push_back({"t", t0, t1, nt});
  for (int i = 1; i <= k; ++i) spec.axes.push_back({"x" + std::to_string(i), x0, x1, nx});
  spec.validate();
  return spec;
}

void GridSpec::validate() const {
  if (axes.size() < 2) throw InvalidArgument("grid: need a t axis and at least one x axis");
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const auto& ax = axes[i];
    const std::string expected = i == 0 ? "t" : "x" + std::to_string(i);
    if (ax.name != expected)
      throw InvalidArgument("grid: axis " + std::to_string(i) + " must be named '" + expected + "'");
    if (ax.count < 1) throw InvalidArgument("grid: axis " + ax.name + " needs at least one node");
    if (!std::isfinite(ax.start) || !std::isfinite(ax.end))
      throw InvalidArgument("grid: axis " + ax.name + " has non-finite bounds");
    if (ax.count > 1 && ax.start == ax.end)
      throw InvalidArgument("grid: axis " + ax.name + " is degenerate but has several nodes");
  }
}

std::size_t GridSpec::node_count() const {
  std::size_t n = 1;
  for (const auto& ax : axes) n *= static_cast<std::size_t>(ax.count);
  return n;
}

Vector GridSpec::node(std::size_t index) const {
  Vector z(axes.size());
  for (std::size_t i = axes.size(); i-- > 0;) {
    const auto c = static_cast<std::size_t>(axes[i].count);
    z[static_cast<Eigen::Index>(i)] = axes[i].value(static_cast<int>(index % c));
    index /= c;
  }
  return z;
}

std::string GridSpec::to_string() const {
  std::ostringstream s;
  s.precision(17);
  for (std::size_t i = 0; i < axes.size(); ++i)
    s << (i ? "," : "") << axes[i].name << "=" << axes[i].start << ":" << axes[i].end << ":"
      << axes[i].count;
  return s.str();
}

nlohmann::json GridSpec::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& ax : axes)
    j.push_back({{"name", ax.name}, {"start", ax.start}, {"end", ax.end}, {"count", ax.count}});
  return j;
}

}  // namespace simcurv

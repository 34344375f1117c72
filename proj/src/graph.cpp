#include "simcurv/graph.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "simcurv/error.hpp"

namespace simcurv {
namespace {

std::string point_string(const Vector& z) {
  std::ostringstream s;
  s << "(";
  for (Eigen::Index i = 0; i < z.size(); ++i) s << (i ? ", " : "") << z[i];
  s << ")";
  return s.str();
}

GraphEval closed_jets(const SystemPtr& system, const IvfPtr& a, const Vector& z, int order) {
  const int n = static_cast<int>(z.size());
  const int m = system->fast_dim();
  const auto vars = make_variables(std::span<const double>(z.data(), n), order);
  std::vector<Taylor> out(m, Taylor::constant_like(vars.front(), 0.0));
  system->p_closed(vars.front(), std::span<const Taylor>(vars).subspan(1), *a, out);

  GraphEval ge;
  ge.point = z;
  ge.order = order;
  ge.source = GraphSource::closed_form;
  ge.p.resize(m);
  ge.d1.resize(m, n);
  std::vector<int> e(n, 0);
  for (int r = 0; r < m; ++r) {
    ge.p[r] = out[r].value();
    for (int i = 0; i < n; ++i) {
      e[i] = 1;
      ge.d1(r, i) = out[r].derivative_value(e);
      e[i] = 0;
    }
  }
  if (order >= 2) {
    ge.d2.assign(m, Matrix(n, n));
    for (int r = 0; r < m; ++r)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          ++e[i];
          ++e[j];
          ge.d2[r](i, j) = ge.d2[r](j, i) = out[r].derivative_value(e);
          --e[i];
          --e[j];
        }
  }
  if (order >= 3) {
    ge.d3.assign(m, std::vector<Matrix>(n, Matrix(n, n)));
    for (int r = 0; r < m; ++r)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          for (int l = j; l < n; ++l) {
            ++e[i];
            ++e[j];
            ++e[l];
            const double v = out[r].derivative_value(e);
            --e[i];
            --e[j];
            --e[l];
            ge.d3[r][i](j, l) = ge.d3[r][i](l, j) = ge.d3[r][j](i, l) = ge.d3[r][j](l, i) =
                ge.d3[r][l](i, j) = ge.d3[r][l](j, i) = v;
          }
  }
  return ge;
}

// Memoized point evaluations of p around one base point.
class Stencil {
 public:
  Stencil(const SystemPtr& system, const IvfPtr& a, const Vector& z0, FdBase base,
          const BvpConfig& bvp)
      : system_(system), a_(a), z0_(z0), base_(base), bvp_(bvp) {}

  const Vector& at(std::initializer_list<std::pair<int, double>> offsets) {
    Vector z = z0_;
    for (const auto& [i, h] : offsets) z[i] += h;
    std::vector<long long> key(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) key[i] = std::llround(z[i] * 1e12);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    return memo_.emplace(std::move(key), evaluate(z)).first->second;
  }

 private:
  Vector evaluate(const Vector& z) const {
    const int k = system_->slow_dim();
    try {
      if (base_ == FdBase::closed_p) {
        Vector out(system_->fast_dim());
        system_->p_closed(z[0], std::span<const double>(z.data() + 1, k), *a_,
                          std::span<double>(out.data(), out.size()));
        if (!out.allFinite()) throw NumericalFailure("closed parameterization is not finite");
        return out;
      }
      BvpProblem pb{system_, z[0], z.tail(k), a_};
      return solve_bvp(pb, bvp_).y_star;
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("graph stencil point " + point_string(z) + ": " + e.what());
    } catch (const NumericalFailure& e) {
      throw NumericalFailure("graph stencil point " + point_string(z) + ": " + e.what());
    }
  }

  SystemPtr system_;
  IvfPtr a_;
  Vector z0_;
  FdBase base_;
  const BvpConfig& bvp_;
  std::map<std::vector<long long>, Vector> memo_;
};

GraphEval finite_differences(const SystemPtr& system, const IvfPtr& a, const Vector& z, int order,
                             const GraphOptions& opt) {
  if (opt.fd_base == FdBase::bvp && order > 2)
    throw Unsupported(system->name() + ": third partials over the shooting solver are not supported");
  if (opt.fd_base == FdBase::closed_p && !system->has_closed_parameterization())
    throw Unsupported(system->name() + ": no closed parameterization to difference");

  const int n = static_cast<int>(z.size());
  const int m = system->fast_dim();
  const bool over_bvp = opt.fd_base == FdBase::bvp;
  auto step = [&](double base, int i) { return base * std::max(1.0, std::abs(z[i])); };
  const double b1 = over_bvp ? FdSteps::bvp : FdSteps::first;
  const double b2 = over_bvp ? FdSteps::bvp : FdSteps::second;

  Stencil s(system, a, z, opt.fd_base, opt.bvp);
  GraphEval ge;
  ge.point = z;
  ge.order = order;
  ge.source = GraphSource::finite_difference;
  ge.p = s.at({});
  ge.d1.resize(m, n);
  for (int i = 0; i < n; ++i) {
    const double h = step(b1, i);
    ge.d1.col(i) = (s.at({{i, h}}) - s.at({{i, -h}})) / (2.0 * h);
  }

  if (order >= 2) {
    ge.d2.assign(m, Matrix(n, n));
    for (int i = 0; i < n; ++i) {
      const double hi = step(b2, i);
      const Vector dii = (s.at({{i, hi}}) - 2.0 * ge.p + s.at({{i, -hi}})) / (hi * hi);
      for (int r = 0; r < m; ++r) ge.d2[r](i, i) = dii[r];
      for (int j = i + 1; j < n; ++j) {
        const double hj = step(b2, j);
        const Vector dij = (s.at({{i, hi}, {j, hj}}) - s.at({{i, hi}, {j, -hj}}) -
                            s.at({{i, -hi}, {j, hj}}) + s.at({{i, -hi}, {j, -hj}})) /
                           (4.0 * hi * hj);
        for (int r = 0; r < m; ++r) ge.d2[r](i, j) = ge.d2[r](j, i) = dij[r];
      }
    }
  }

  if (order >= 3) {
    ge.d3.assign(m, std::vector<Matrix>(n, Matrix(n, n)));
    auto put = [&](int i, int j, int l, const Vector& v) {
      for (int r = 0; r < m; ++r)
        ge.d3[r][i](j, l) = ge.d3[r][i](l, j) = ge.d3[r][j](i, l) = ge.d3[r][j](l, i) =
            ge.d3[r][l](i, j) = ge.d3[r][l](j, i) = v[r];
    };
    for (int i = 0; i < n; ++i) {
      const double hi = step(FdSteps::third, i);
      put(i, i, i,
          (s.at({{i, 2 * hi}}) - 2.0 * s.at({{i, hi}}) + 2.0 * s.at({{i, -hi}}) - s.at({{i, -2 * hi}})) /
              (2.0 * hi * hi * hi));
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double hj = step(FdSteps::third, j);
        const Vector plus = s.at({{i, hi}, {j, hj}}) - 2.0 * s.at({{j, hj}}) + s.at({{i, -hi}, {j, hj}});
        const Vector minus =
            s.at({{i, hi}, {j, -hj}}) - 2.0 * s.at({{j, -hj}}) + s.at({{i, -hi}, {j, -hj}});
        put(i, i, j, (plus - minus) / (hi * hi * 2.0 * hj));
      }
      for (int j = i + 1; j < n; ++j)
        for (int l = j + 1; l < n; ++l) {
          const double hj = step(FdSteps::third, j);
          const double hl = step(FdSteps::third, l);
          Vector acc = Vector::Zero(m);
          for (int si : {1, -1})
            for (int sj : {1, -1})
              for (int sl : {1, -1})
                acc += double(si * sj * sl) * s.at({{i, si * hi}, {j, sj * hj}, {l, sl * hl}});
          put(i, j, l, acc / (8.0 * hi * hj * hl));
        }
    }
  }

  if (!ge.p.allFinite() || !ge.d1.allFinite())
    throw NumericalFailure("graph derivatives are not finite at " + point_string(z));
  const double defect = symmetry_defect(ge);
  if (defect > opt.symmetry_tol) {
    std::ostringstream msg;
    msg << "graph derivatives at " << point_string(z) << ": symmetry defect " << defect;
    throw NumericalFailure(msg.str());
  }
  return ge;
}

}  // namespace

GraphEval eval_graph(const SystemPtr& system, const IvfPtr& a, double t, std::span<const double> x,
                     int order, const GraphOptions& options) {
  if (!system || !a) throw InvalidArgument("eval_graph: system and lift are required");
  if (static_cast<int>(x.size()) != system->slow_dim())
    throw InvalidArgument(system->name() + ": point has the wrong dimension");
  if (order < 1 || order > 3) throw InvalidArgument("eval_graph: order must be 1, 2 or 3");
  Vector z(x.size() + 1);
  z[0] = t;
  for (std::size_t i = 0; i < x.size(); ++i) z[i + 1] = x[i];
  if (!z.allFinite()) throw InvalidArgument("eval_graph: point is not finite");

  switch (options.mode) {
    case GraphMode::closed:
      if (!system->has_closed_parameterization())
        throw Unsupported(system->name() + ": no closed parameterization");
      return closed_jets(system, a, z, order);
    case GraphMode::numeric:
      return finite_differences(system, a, z, order, options);
    case GraphMode::automatic:
      break;
  }
  if (system->has_closed_parameterization()) return closed_jets(system, a, z, order);
  GraphOptions bvp_opts = options;
  bvp_opts.fd_base = FdBase::bvp;
  return finite_differences(system, a, z, order, bvp_opts);
}

Vector eval_p(const SystemPtr& system, const IvfPtr& a, double t, std::span<const double> x,
              const BvpConfig& bvp) {
  if (static_cast<int>(x.size()) != system->slow_dim())
    throw InvalidArgument(system->name() + ": point has the wrong dimension");
  if (system->has_closed_parameterization()) {
    Vector out(system->fast_dim());
    system->p_closed(t, x, *a, std::span<double>(out.data(), out.size()));
    return out;
  }
  Vector xs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xs[i] = x[i];
  return solve_bvp(BvpProblem{system, t, xs, a}, bvp).y_star;
}

Matrix immersion_jacobian(const GraphEval& ge) {
  const int n = static_cast<int>(ge.point.size());
  const int m = static_cast<int>(ge.d1.rows());
  if (ge.d1.cols() != n) throw InvalidArgument("immersion_jacobian: d1 has the wrong shape");
  Matrix J(n + m, n);
  J.topRows(n).setIdentity();
  J.bottomRows(m) = ge.d1;
  return J;
}

double symmetry_defect(const GraphEval& ge) {
  double d = 0.0;
  for (const Matrix& h : ge.d2) d = std::max(d, (h - h.transpose()).cwiseAbs().maxCoeff());
  for (const auto& r : ge.d3) {
    const int n = static_cast<int>(r.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          const double v = r[i](j, l);
          d = std::max({d, std::abs(v - r[i](l, j)), std::abs(v - r[j](i, l)), std::abs(v - r[l](j, i))});
        }
  }
  return d;
}

}  // namespace simcurv

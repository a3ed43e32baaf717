#include "hkd/systems.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hkd/errors.hpp"
#include "hkd/parallel.hpp"

namespace hkd {
namespace {

std::size_t tri(std::size_t i, std::size_t j) { return i * (i + 1) / 2 + j; }

std::string describe_pair(double t, double s) {
  std::ostringstream os;
  os << "(t, s) = (" << t << ", " << s << ")";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// EvolutionSystem

EvolutionSystem::EvolutionSystem(StateSpace space, OperatorFn u, ProjectorFn p, std::string label)
    : space_(space), u_(std::move(u)), p_(std::move(p)), label_(std::move(label)) {}

Matrix EvolutionSystem::u(double t, double s) const {
  if (!(s >= 0.0) || !(t >= s)) throw DomainError("U(t, s) requires t >= s >= 0, got " + describe_pair(t, s));
  Matrix m = u_(t, s);
  if (!all_finite(m)) throw DomainError("U" + describe_pair(t, s) + " has non-finite entries");
  return m;
}

Matrix EvolutionSystem::p(double t) const {
  if (!(t >= 0.0)) throw DomainError("P(t) requires t >= 0");
  Matrix m = p_(t);
  if (!all_finite(m)) throw DomainError("P(t) has non-finite entries");
  return m;
}

Matrix EvolutionSystem::q(double t) const { return space_.identity() - p(t); }

// ---------------------------------------------------------------------------
// SampledSystem

SampledSystem::SampledSystem(SystemPtr system, TimeGrid grid)
    : system_(std::move(system)), grid_(std::move(grid)) {
  const std::size_t n = grid_.size();
  u_.resize(n * (n + 1) / 2);
  p_.resize(n);
  q_.resize(n);
  parallel::for_each_index(n, [&](std::size_t i) {
    p_[i] = system_->p(grid_[i]);
    q_[i] = system_->space().identity() - p_[i];
    for (std::size_t j = 0; j <= i; ++j) u_[tri(i, j)] = system_->u(grid_[i], grid_[j]);
  });
}

const Matrix& SampledSystem::u(std::size_t i, std::size_t j) const {
  if (j > i || i >= grid_.size()) throw DomainError("SampledSystem::u: index outside t >= s");
  return u_[tri(i, j)];
}

// ---------------------------------------------------------------------------
// Structural checks

EvolutionCheck check_evolution_property(const SampledSystem& sys, double tol) {
  const std::size_t n = sys.size();
  EvolutionCheck result;
  const Matrix eye = sys.space().identity();
  for (std::size_t i = 0; i < n; ++i)
    result.identity_defect = std::max(result.identity_defect, max_abs(sys.u(i, i) - eye));

  const auto worst = parallel_worst<Triple>(n, [&](std::size_t i) {
    Worst<Triple> w;
    Matrix product;
    for (std::size_t j = 0; j <= i; ++j) {
      for (std::size_t l = 0; l <= j; ++l) {
        const Matrix& direct = sys.u(i, l);
        product.noalias() = sys.u(i, j) * sys.u(j, l);
        const double scale = std::max({1.0, max_abs(direct), max_abs(sys.u(i, j)) * max_abs(sys.u(j, l))});
        w.offer(max_abs(direct - product) / scale, Triple{i, j, l});
      }
    }
    return w;
  });
  result.worst_defect = worst.seen ? worst.value : 0.0;
  result.worst = worst.where;
  result.pass = result.identity_defect <= tol && result.worst_defect <= tol;
  return result;
}

ProjectorFamilyCheck check_projector_family(const SampledSystem& sys, double tol) {
  ProjectorFamilyCheck result;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto c = is_projector(sys.p(i), tol);
    if (c.defect > result.worst_defect || i == 0) {
      result.worst_defect = c.defect;
      result.worst_index = i;
    }
    result.max_projector_entry = std::max(result.max_projector_entry, max_abs(sys.p(i)));
  }
  result.pass = result.worst_defect <= tol;
  return result;
}

double invariance_defect(const EvolutionSystem& sys, double t, double s, const Vector& x) {
  const Matrix u = sys.u(t, s);
  return sys.space().norm(u * (sys.p(s) * x) - sys.p(t) * (u * x));
}

InvarianceCheck check_invariance(const SampledSystem& sys, std::span<const Vector> probes,
                                 double tol) {
  const auto& space = sys.space();
  const std::size_t n = sys.size();
  struct Row {
    Worst<PairProbe> p, q;
    std::vector<double> raw;  // raw defect at each location offered to p
  };
  std::vector<Row> rows(n);
  parallel::for_each_index(n, [&](std::size_t i) {
    Row& row = rows[i];
    Vector ux, lhs;
    for (std::size_t j = 0; j <= i; ++j) {
      const Matrix& u = sys.u(i, j);
      for (std::size_t k = 0; k < probes.size(); ++k) {
        const Vector& x = probes[k];
        ux.noalias() = u * x;
        const double scale = 1.0 + space.norm(ux);
        lhs.noalias() = u * (sys.p(j) * x);
        const double p_def = space.norm(lhs - sys.p(i) * ux);
        lhs.noalias() = u * (sys.q(j) * x);
        const double q_def = space.norm(lhs - sys.q(i) * ux);
        row.p.offer(p_def / scale, PairProbe{i, j, k});
        row.q.offer(q_def / scale, PairProbe{i, j, k});
      }
    }
  });
  Worst<PairProbe> p_total, q_total;
  for (const auto& row : rows) {
    p_total.merge(row.p);
    q_total.merge(row.q);
  }
  InvarianceCheck result;
  result.worst_relative = p_total.seen ? p_total.value : 0.0;
  result.worst = p_total.where;
  result.q_worst_relative = q_total.seen ? q_total.value : 0.0;
  if (p_total.seen) {
    const auto [i, j, k] = p_total.where;
    const Matrix& u = sys.u(i, j);
    result.worst_defect = space.norm(u * (sys.p(j) * probes[k]) - sys.p(i) * (u * probes[k]));
  }
  result.pass = result.worst_relative <= tol && result.q_worst_relative <= tol;
  return result;
}

// ---------------------------------------------------------------------------
// Kernel inverse

Matrix build_kernel_inverse(const EvolutionSystem& sys, double t, double s, double tol) {
  const Matrix u = sys.u(t, s);
  const Matrix qt = sys.q(t);
  const Matrix qs = sys.q(s);
  const SubspaceBasis bt = range_basis(qt, tol);
  const SubspaceBasis bs = range_basis(qs, tol);
  if (bt.cols() != bs.cols())
    throw NotCompatibleError("ker P(t) and ker P(s) differ in dimension at " + describe_pair(t, s));
  Matrix w(u.cols(), bt.cols());
  try {
    for (Eigen::Index c = 0; c < bt.cols(); ++c) w.col(c) = solve_on_subspace(u, bs, bt.col(c), tol);
  } catch (const NotCompatibleError& e) {
    throw NotCompatibleError(std::string("U restricted to ker P(s) is singular at ") +
                             describe_pair(t, s) + ": " + e.what());
  } catch (const ResidualError& e) {
    throw NotCompatibleError(std::string("U does not map ker P(s) onto ker P(t) at ") +
                             describe_pair(t, s) + ": " + e.what());
  }
  return w * bt.transpose() * qt;
}

KernelInverse::KernelInverse(std::shared_ptr<const SampledSystem> sampled, double tol)
    : sampled_(std::move(sampled)), tol_(tol) {
  const std::size_t n = sampled_->size();
  slots_ = std::make_unique<Slot[]>(n * (n + 1) / 2);
}

const Matrix& KernelInverse::at(std::size_t i, std::size_t j) const {
  if (j > i || i >= sampled_->size()) throw DomainError("KernelInverse::at: index outside t >= s");
  Slot& slot = slots_[tri(i, j)];
  std::call_once(slot.once, [&] {
    try {
      const auto& grid = sampled_->grid();
      slot.value = build_kernel_inverse(sampled_->system(), grid[i], grid[j], tol_);
    } catch (...) {
      slot.error = std::current_exception();
    }
  });
  if (slot.error) std::rethrow_exception(slot.error);
  return slot.value;
}

void KernelInverse::build_all() const {
  parallel::for_each_index(sampled_->size(), [&](std::size_t i) {
    for (std::size_t j = 0; j <= i; ++j) at(i, j);
  });
}

VIdentitiesCheck check_v_identities(const KernelInverse& v, std::span<const Vector> probes,
                                    double tol) {
  v.build_all();
  const SampledSystem& sys = v.sampled();
  const auto& space = sys.space();
  const std::size_t n = sys.size();
  struct Row {
    Worst<PairProbe> v1, v2, v3, v4;
  };
  std::vector<Row> rows(n);
  parallel::for_each_index(n, [&](std::size_t i) {
    Row& row = rows[i];
    const auto rel = [&](const Vector& a, const Vector& b) {
      return space.norm(a - b) / (1.0 + std::max(space.norm(a), space.norm(b)));
    };
    for (std::size_t j = 0; j <= i; ++j) {
      const Matrix& u = sys.u(i, j);
      const Matrix& vij = v.at(i, j);
      for (std::size_t k = 0; k < probes.size(); ++k) {
        const Vector& x = probes[k];
        const Vector qtx = sys.q(i) * x;
        const Vector qsx = sys.q(j) * x;
        const Vector vqtx = vij * qtx;
        row.v1.offer(rel(u * vqtx, qtx), {i, j, k});
        row.v2.offer(rel(vij * (u * qsx), qsx), {i, j, k});
        row.v4.offer(rel(vqtx, sys.q(j) * vqtx), {i, j, k});
        const Vector vx = vij * x;
        for (std::size_t l = 0; l <= j; ++l)
          row.v3.offer(rel(v.at(i, l) * x, v.at(j, l) * vx), {i, j, k * n + l});
      }
    }
  });
  Worst<PairProbe> w1, w2, w3, w4;
  for (const auto& row : rows) {
    w1.merge(row.v1);
    w2.merge(row.v2);
    w3.merge(row.v3);
    w4.merge(row.v4);
  }
  const auto finish = [tol](const Worst<PairProbe>& w) {
    const double value = w.seen ? w.value : 0.0;
    return IdentityResult{value <= tol, value};
  };
  return {finish(w1), finish(w2), finish(w3), finish(w4)};
}

// ---------------------------------------------------------------------------
// Gallery

ScalarProfile ScalarProfile::exp_shift(double shift) {
  if (!std::isfinite(shift)) throw DomainError("exp-shift profile needs a finite shift");
  std::ostringstream os;
  os << "exp-shift:" << shift;
  return ScalarProfile(Kind::exp_shift, shift, 0.0, os.str());
}

ScalarProfile ScalarProfile::linear(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || b < 0.0)
    throw DomainError("linear profile needs finite a and b >= 0");
  std::ostringstream os;
  os << "linear:" << a << ":" << b;
  return ScalarProfile(Kind::linear, a, b, os.str());
}

ScalarProfile ScalarProfile::parse(std::string_view spec) {
  const auto number = [&](std::string_view text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
      throw DomainError("invalid u profile '" + std::string(spec) + "'");
    return v;
  };
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw DomainError("invalid u profile '" + std::string(spec) + "'");
  const auto head = spec.substr(0, colon);
  const auto tail = spec.substr(colon + 1);
  if (head == "exp-shift") return exp_shift(number(tail));
  if (head == "linear") {
    const auto sep = tail.find(':');
    if (sep == std::string_view::npos) throw DomainError("linear profile is linear:<a>:<b>");
    return linear(number(tail.substr(0, sep)), number(tail.substr(sep + 1)));
  }
  throw DomainError("invalid u profile '" + std::string(spec) + "'");
}

double ScalarProfile::operator()(double t) const {
  return kind_ == Kind::exp_shift ? std::exp(t + a_) : a_ + b_ * t;
}

double ScalarProfile::phi(double t) const {
  if (kind_ == Kind::exp_shift) return std::exp(t + a_) * (t + a_);
  const double u = a_ + b_ * t;
  return u * std::log(u);
}

namespace {

Matrix diag10() {
  Matrix p = Matrix::Zero(2, 2);
  p(0, 0) = 1.0;
  return p;
}

/// P(t)(x1, x2) = (x1 - x2 e^t, 0).
Matrix moving_p(double t) {
  Matrix p(2, 2);
  p << 1.0, -std::exp(t), 0.0, 0.0;
  return p;
}

Matrix moving_q(double t) {
  Matrix q(2, 2);
  q << 0.0, std::exp(t), 0.0, 1.0;
  return q;
}

struct Coefficients {
  GrowthRate h, k;
  /// (h(s)/h(t)) r(s)/r(t)
  double decay(double t, double s) const { return h(s) / h(t) * (logpoly(s) / logpoly(t)); }
  /// (k(t)/k(s)) r(s)/r(t)
  double expand(double t, double s) const { return k(t) / k(s) * (logpoly(s) / logpoly(t)); }
};

SystemPtr make_system(StateSpace space, EvolutionSystem::OperatorFn u,
                      EvolutionSystem::ProjectorFn p, std::string label) {
  return std::make_shared<const EvolutionSystem>(space, std::move(u), std::move(p), std::move(label));
}

std::string rate_label(std::string_view name, const GalleryOptions& o) {
  return std::string(name) + "[h=" + o.h.spec() + ",k=" + o.k.spec() + "]";
}

}  // namespace

SystemPtr make_split_system(double decay, double growth) {
  std::ostringstream label;
  label << "split-exp[decay=" << decay << ",growth=" << growth << "]";
  return make_system(
      StateSpace(2),
      [decay, growth](double t, double s) {
        const Matrix p = diag10();
        const Matrix q = Matrix::Identity(2, 2) - p;
        return Matrix(std::exp(-decay * (t - s)) * p + std::exp(growth * (t - s)) * q);
      },
      [](double) { return diag10(); }, label.str());
}

SystemPtr example_gallery(std::string_view name, const GalleryOptions& o) {
  const Coefficients co{o.h, o.k};
  if (name == "scalar-ulnu") {
    const ScalarProfile u = o.u.value_or(ScalarProfile::exp_shift(1.0));
    for (double t : o.validation_grid.points()) {
      if (!(u(t) > 1.0))
        throw DomainError("scalar-ulnu needs inf u > 1; u(" + std::to_string(t) + ") = " +
                          std::to_string(u(t)));
    }
    return make_system(
        StateSpace(1), [u](double t, double s) { return Matrix::Constant(1, 1, u.phi(s) / u.phi(t)); },
        [](double) { return Matrix::Identity(1, 1); }, "scalar-ulnu[u=" + u.spec() + "]");
  }
  if (o.u) throw DomainError("--u only applies to scalar-ulnu");
  if (name == "dicho-2d-literal") {
    return make_system(
        StateSpace(2),
        [co](double t, double s) {
          return Matrix(co.decay(t, s) * moving_p(s) + co.expand(t, s) * moving_q(s));
        },
        moving_p, rate_label(name, o));
  }
  if (name == "dicho-2d-repaired") {
    return make_system(
        StateSpace(2),
        [co](double t, double s) {
          return Matrix(co.decay(t, s) * moving_p(s) + co.expand(t, s) * moving_q(t));
        },
        moving_p, rate_label(name, o));
  }
  if (name == "dicho-2d-constantP") {
    return make_system(
        StateSpace(2),
        [co](double t, double s) {
          const Matrix p = diag10();
          return Matrix(co.decay(t, s) * p + co.expand(t, s) * (Matrix::Identity(2, 2) - p));
        },
        [](double) { return diag10(); }, rate_label(name, o));
  }
  if (name == "growth-not-dicho") {
    return make_system(
        StateSpace(2),
        [co](double t, double s) {
          const Matrix p = diag10();
          const double r = logpoly(s) / logpoly(t);
          return Matrix(co.h(t) / co.h(s) * r * p +
                        co.k(s) / co.k(t) * r * (Matrix::Identity(2, 2) - p));
        },
        [](double) { return diag10(); }, rate_label(name, o));
  }
  if (name == "split-exp") return make_split_system(1.0, 1.0);
  if (name == "identity-2d") {
    return make_system(
        StateSpace(2), [](double, double) { return Matrix(Matrix::Identity(2, 2)); },
        [](double) { return diag10(); }, "identity-2d");
  }
  throw DomainError("unknown example '" + std::string(name) + "'");
}

}  // namespace hkd

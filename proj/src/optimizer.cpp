#include "mlqst/optimizer.hpp"

#include <cmath>
#include <limits>

namespace mlqst {

std::string_view to_string(Algorithm a) {
  return a == Algorithm::rhor ? "rhor" : "gradient_ascent";
}

std::string_view to_string(StepKind s) {
  return s == StepKind::rhor ? "rhor" : "gradient_ascent";
}

std::string_view to_string(StopReason s) {
  switch (s) {
    case StopReason::rule_satisfied: return "rule_satisfied";
    case StopReason::max_iters: return "max_iters";
    case StopReason::stalled: return "stalled";
  }
  return "unknown";
}

void StopSpec::validate() const {
  if (!(r_threshold > 0.0)) {
    throw Error(ErrorCode::InvalidStopSpec, "r_threshold must be positive");
  }
  if (max_iters < 1) {
    throw Error(ErrorCode::InvalidStopSpec, "max_iters must be at least 1");
  }
  if (stall_window < 1 || !(stall_trace_dist >= 0.0)) {
    throw Error(ErrorCode::InvalidStopSpec, "invalid stall criterion");
  }
}

namespace {

constexpr double kLineSearchTol = 1e-10;
constexpr double kUpdateTraceFloor = 1e-300;

// Everything the iteration needs at one iterate, computed once.
struct Point {
  DensityMatrix rho;
  Eigen::VectorXd p;
  double loglik;
  double f;
  double objective;
  ComplexMatrix gradient;
  double top;
  ComplexVector top_vec;
  double r;
};

class Objective {
 public:
  Objective(const Dataset& data, const LinearTerm* term) : data_(data), term_(term) {
    if (term_ != nullptr && term_->observable.dim() != data.dim()) {
      throw Error(ErrorCode::DimensionMismatch, "observable dimension does not match dataset");
    }
  }

  double lambda() const { return term_ ? term_->lambda : 0.0; }

  double observable_value(const ComplexMatrix& x) const {
    if (term_ == nullptr) return 0.0;
    return (x.array() * term_->observable.matrix().array().conjugate()).sum().real();
  }

  Point evaluate(DensityMatrix rho) const {
    if (rho.dim() != data_.dim()) {
      throw Error(ErrorCode::DimensionMismatch, "state dimension does not match dataset");
    }
    Eigen::VectorXd p = event_probabilities(data_, rho);
    const double loglik = data_.weights().dot(p.array().log().matrix());
    const double f = observable_value(rho.matrix());
    ComplexMatrix m = data_.weighted_sum(data_.weights().cwiseQuotient(p));
    if (term_ != nullptr) m += term_->lambda * term_->observable.matrix();
    const EigenPair top = max_eig_hermitian(HermitianOperator::from_matrix(m));
    const double n = static_cast<double>(data_.n_total());
    const double r = top.value - n - lambda() * f;
    return Point{std::move(rho), std::move(p), loglik, f, loglik + lambda() * f,
                 std::move(m), top.value, top.vector.amplitudes(), r};
  }

  // K((1 - eps) rho + eps sigma) from the per-event probabilities of both ends.
  double along_line(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double f_rho,
                    double f_sigma, double eps) const {
    const auto& w = data_.weights();
    double total = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double pe = (1.0 - eps) * p(i) + eps * q(i);
      if (!(pe > kProbabilityFloor)) return -std::numeric_limits<double>::infinity();
      total += w(i) * std::log(pe);
    }
    return total + lambda() * ((1.0 - eps) * f_rho + eps * f_sigma);
  }

  const Dataset& data() const { return data_; }

 private:
  const Dataset& data_;
  const LinearTerm* term_;
};

double golden_section_max(const auto& fn, double tol) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0;
  double b = 1.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = fn(d);
    }
  }
  return 0.5 * (a + b);
}

struct StepOutcome {
  Point next;
  StepKind kind;
  std::optional<double> epsilon;
};

StepOutcome line_search(const Objective& obj, const Point& cur) {
  // r is the slope of K along the segment at eps = 0.
  if (!(cur.r > 0.0)) return {cur, StepKind::gradient_ascent, 0.0};

  const ComplexMatrix sigma = cur.top_vec * cur.top_vec.adjoint();
  const Eigen::VectorXd q = obj.data().traces_with(sigma);
  const double f_sigma = obj.observable_value(sigma);
  auto value = [&](double eps) { return obj.along_line(cur.p, q, cur.f, f_sigma, eps); };

  double eps = golden_section_max(value, kLineSearchTol);
  double best = value(eps);
  if (const double at_one = value(1.0); at_one >= best) {
    eps = 1.0;
    best = at_one;
  }
  if (!(best > cur.objective)) return {cur, StepKind::gradient_ascent, 0.0};

  ComplexMatrix mixed = (1.0 - eps) * cur.rho.matrix() + eps * sigma;
  Point next = obj.evaluate(make_density(0.5 * (mixed + mixed.adjoint())));
  // Revalidation can shift K by rounding; never accept a decrease.
  if (!(next.objective >= cur.objective)) return {cur, StepKind::gradient_ascent, 0.0};
  return {std::move(next), StepKind::gradient_ascent, eps};
}

DensityMatrix rhor_update(const Point& cur) {
  if (!(cur.top > 0.0)) {
    throw Error(ErrorCode::NonPositiveUpdate,
                "gradient operator has a non-positive top eigenvalue");
  }
  ComplexMatrix x = cur.gradient * cur.rho.matrix() * cur.gradient;
  x = 0.5 * (x + x.adjoint()).eval();
  const double tr = x.trace().real();
  if (!(tr >= kUpdateTraceFloor)) {
    throw Error(ErrorCode::DegenerateUpdate, "R rho R has vanishing trace");
  }
  return make_density(x / tr);
}

StepOutcome safeguarded_rhor(const Objective& obj, const Point& cur) {
  std::optional<Point> candidate;
  try {
    candidate = obj.evaluate(rhor_update(cur));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonPositiveUpdate && e.code() != ErrorCode::ZeroProbability &&
        e.code() != ErrorCode::DegenerateUpdate) {
      throw;
    }
  }
  if (candidate && candidate->objective >= cur.objective) {
    return {std::move(*candidate), StepKind::rhor, std::nullopt};
  }
  return line_search(obj, cur);
}

FitResult run(const Objective& obj, Algorithm algo, const StopSpec& stop,
              const std::optional<DensityMatrix>& rho0) {
  stop.validate();
  const Dataset& data = obj.data();
  Point cur = obj.evaluate(rho0 ? *rho0 : DensityMatrix::maximally_mixed(data.dim()));

  std::vector<IterationRecord> trace;
  StopReason reason = StopReason::max_iters;
  int still = 0;
  for (std::int64_t k = 1; k <= stop.max_iters; ++k) {
    StepOutcome step = algo == Algorithm::rhor ? safeguarded_rhor(obj, cur) : line_search(obj, cur);
    const double dist = trace_distance(cur.rho, step.next.rho);
    cur = std::move(step.next);
    trace.push_back(IterationRecord{k, cur.loglik, cur.objective, cur.r, dist, step.kind,
                                    step.epsilon});

    still = dist < stop.stall_trace_dist ? still + 1 : 0;
    if (cur.r <= stop.r_threshold) {
      reason = StopReason::rule_satisfied;
      break;
    }
    if (still >= stop.stall_window) {
      reason = StopReason::stalled;
      break;
    }
  }
  return FitResult{std::move(cur.rho), std::move(trace), reason, cur.r, cur.loglik};
}

}  // namespace

DensityMatrix rhor_step(const Dataset& data, const DensityMatrix& rho) {
  const Objective obj(data, nullptr);
  return rhor_update(obj.evaluate(rho));
}

DensityMatrix rhor_step(const Dataset& data, const DensityMatrix& rho, const LinearTerm& term) {
  const Objective obj(data, &term);
  return rhor_update(obj.evaluate(rho));
}

LineSearchStep gradient_ascent_step(const Dataset& data, const DensityMatrix& rho) {
  const Objective obj(data, nullptr);
  StepOutcome s = line_search(obj, obj.evaluate(rho));
  return {std::move(s.next.rho), s.epsilon.value_or(0.0)};
}

LineSearchStep gradient_ascent_step(const Dataset& data, const DensityMatrix& rho,
                                    const LinearTerm& term) {
  const Objective obj(data, &term);
  StepOutcome s = line_search(obj, obj.evaluate(rho));
  return {std::move(s.next.rho), s.epsilon.value_or(0.0)};
}

FitResult maximize(const Dataset& data, Algorithm algo, const StopSpec& stop,
                   const std::optional<DensityMatrix>& rho0) {
  return run(Objective(data, nullptr), algo, stop, rho0);
}

FitResult maximize(const Dataset& data, Algorithm algo, const StopSpec& stop,
                   const std::optional<DensityMatrix>& rho0, const LinearTerm& term) {
  return run(Objective(data, &term), algo, stop, rho0);
}

}  // namespace mlqst

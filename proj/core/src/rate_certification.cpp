#include "convhom/rate_certification.hpp"

#include <Eigen/LU>

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace convhom {

namespace {
constexpr const char* kStage = "rate_certification";
}

const char* to_string(Ablation a) noexcept {
  switch (a) {
    case Ablation::none: return "full";
    case Ablation::no_drift: return "no-drift";
    case Ablation::no_q0: return "no-q0";
    case Ablation::neither: return "neither";
  }
  return "unknown";
}

Ablation parse_ablation(const std::string& name) {
  if (name == "no-drift") return Ablation::no_drift;
  if (name == "no-q0") return Ablation::no_q0;
  if (name == "neither") return Ablation::neither;
  raise(ErrorKind::usage, kStage, "unknown ablation '" + name + "' (expected no-drift, no-q0, neither)");
}

EffectiveOptions options_for(Ablation a) noexcept {
  EffectiveOptions o;
  o.drift = a == Ablation::none || a == Ablation::no_q0;
  o.weight_q0 = a == Ablation::none || a == Ablation::no_drift;
  return o;
}

void check_ablation(const Problem& problem, Ablation a) {
  if (a == Ablation::no_drift && problem.model().alpha.norm() <= 1e-12 * std::max(1.0, problem.moments()[1])) {
    raise(ErrorKind::usage, kStage, "no-drift ablation requested but the effective drift is zero");
  }
}

std::vector<Coord> sweep_points(const SweepConfig& cfg, int dim, double delta0) {
  const int m = cfg.xi_per_axis > 0 ? cfg.xi_per_axis : (dim == 1 ? 64 : 16);
  std::vector<Coord> pts;
  const int m1 = dim == 2 ? m : 1;
  for (int j = 0; j < m1; ++j) {
    for (int i = 0; i < m; ++i) {
      Coord xi(dim);
      xi(0) = -kPi + kTwoPi * i / m;
      if (dim == 2) xi(1) = -kPi + kTwoPi * j / m;
      pts.push_back(xi);
    }
  }
  if (cfg.patch_points > 0) {
    // Geometric radii from below the smallest eps up to delta0.
    double eps_min = delta0;
    for (double e : cfg.eps) eps_min = std::min(eps_min, e);
    const double lo = std::min(0.25 * eps_min, 0.01 * delta0);
    const int dirs = dim == 1 ? 1 : 4;
    const int radii = std::max(1, cfg.patch_points / dirs);
    for (int t = 0; t < dirs; ++t) {
      const double th = kPi * (t + 0.5) / (2.0 * dirs);
      for (int k = 0; k < radii; ++k) {
        const double r = radii == 1 ? delta0 : lo * std::pow(delta0 / lo, static_cast<double>(k) / (radii - 1));
        Coord xi(dim);
        if (dim == 1) {
          xi(0) = r;
        } else {
          xi(0) = r * std::cos(th);
          xi(1) = r * std::sin(th);
        }
        pts.push_back(xi);
      }
    }
  }
  return pts;
}

namespace {

double error_with_lu(const Problem& pb, const Eigen::PartialPivLU<CMatrix>& lu, const Coord& xi, double eps,
                     const EffectiveOptions& opt, CVector* warm, const NormOptions& norm) {
  const CellGrid& grid = pb.grid();
  const FourierBasis& fb = pb.fourier();
  const CVector s = effective_symbol(grid, pb.model(), xi, eps, opt);
  const CVector sc = s.conjugate();
  const CVector q = pb.q0().cast<Complex>();
  const bool wq = opt.weight_q0;
  LinearMap diff{grid.size(),
                 [&](const CVector& u) {
                   const CVector wu = wq ? CVector(q.cwiseProduct(u)) : u;
                   const CVector eff = fb.inverse * s.cwiseProduct(fb.forward * wu);
                   return CVector(lu.solve(u) - eff);
                 },
                 [&](const CVector& u) {
                   CVector eff = fb.forward.adjoint() * sc.cwiseProduct(fb.inverse.adjoint() * u);
                   if (wq) eff = q.cwiseProduct(eff);
                   // A^H = U^H L^H P, solved on the factors in place
                   const CMatrix& f = lu.matrixLU();
                   CVector y = f.triangularView<Eigen::Upper>().adjoint().solve(u);
                   f.triangularView<Eigen::UnitLower>().adjoint().solveInPlace(y);
                   return CVector(lu.permutationP().transpose() * y - eff);
                 }};
  const NormResult r = operator_norm_detail(diff, norm, warm);
  if (warm != nullptr) *warm = r.vector;
  return r.value;
}

Eigen::PartialPivLU<CMatrix> factor(const FibreMatrix& fm, double eps) {
  CMatrix M = fm.A;
  M.diagonal().array() += eps * eps;
  Eigen::PartialPivLU<CMatrix> lu(M);
  const double rc = lu.rcond();
  if (!(rc > 0.0) || !std::isfinite(rc) || !(lu.matrixLU().diagonal().cwiseAbs().minCoeff() > 0.0)) raise(ErrorKind::numeric, kStage, "factorization of A(xi) + eps^2 failed");
  return lu;
}

}  // namespace

double fibre_error(const Problem& pb, const FibreMatrix& fm, double eps, const EffectiveOptions& opt, CVector* warm,
                   const NormOptions& norm) {
  if (!(eps > 0.0)) raise(ErrorKind::usage, kStage, "eps must be positive");
  const auto lu = factor(fm, eps);
  return error_with_lu(pb, lu, fm.xi, eps, opt, warm, norm);
}

RateReport sup_sweep(const Problem& pb, const SweepConfig& cfg, double delta0, const std::vector<Ablation>& ablations) {
  if (cfg.eps.size() < 2) raise(ErrorKind::configuration, kStage, "sweep.eps needs at least two values");
  for (std::size_t i = 0; i < cfg.eps.size(); ++i) {
    if (!(cfg.eps[i] > 0.0) || (i > 0 && !(cfg.eps[i] < cfg.eps[i - 1]))) {
      raise(ErrorKind::configuration, kStage, "sweep.eps must be positive and strictly decreasing");
    }
  }
  for (Ablation a : ablations) check_ablation(pb, a);

  RateReport rep;
  rep.eps = cfg.eps;
  rep.delta0 = delta0;
  rep.points = sweep_points(cfg, pb.grid().dim(), delta0);
  const std::size_t P = rep.points.size();
  const std::size_t E = cfg.eps.size();
  const std::size_t V = 1 + ablations.size();
  // errs[variant][point][eps]
  std::vector<std::vector<std::vector<double>>> errs(V, std::vector<std::vector<double>>(P, std::vector<double>(E)));

  std::vector<EffectiveOptions> variants{options_for(Ablation::none)};
  for (Ablation a : ablations) variants.push_back(options_for(a));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    try {
      for (std::size_t p = next++; p < P; p = next++) {
        const FibreMatrix fm = pb.assembler().fibre(rep.points[p]);
        NormOptions norm;
        norm.rel_tol = cfg.norm_tol;
        norm.seed = cfg.seed + 7919ULL * p;
        std::vector<CVector> warm(V);
        for (std::size_t e = 0; e < E; ++e) {
          const auto lu = factor(fm, cfg.eps[e]);
          for (std::size_t v = 0; v < V; ++v) {
            errs[v][p][e] = error_with_lu(pb, lu, fm.xi, cfg.eps[e], variants[v], &warm[v], norm);
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = P;
    }
  };
  const int nthreads = std::max(1, cfg.threads);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  auto curve_of = [&](std::size_t v) {
    RateCurve c;
    for (std::size_t e = 0; e < E; ++e) {
      double best = -1.0;
      Index arg = 0;
      for (std::size_t p = 0; p < P; ++p) {
        if (errs[v][p][e] > best) {
          best = errs[v][p][e];
          arg = static_cast<Index>(p);
        }
      }
      c.E.push_back(best);
      c.scaled.push_back(cfg.eps[e] * cfg.eps[e] * best);
      c.argmax.push_back(arg);
    }
    c.fit = fit_loglog(cfg.eps, c.E);
    c.scaled_fit = fit_loglog(cfg.eps, c.scaled);
    return c;
  };
  rep.full = curve_of(0);
  for (std::size_t a = 0; a < ablations.size(); ++a) rep.ablations[to_string(ablations[a])] = curve_of(a + 1);
  rep.errors = errs[0];
  rep.certificate = scaled_certificate(cfg.eps, rep.full.E);
  for (std::size_t e = 0; e < E; ++e) rep.C_hat = std::max(rep.C_hat, cfg.eps[e] * rep.full.E[e]);
  return rep;
}

LogLogFit fit_rate(const std::vector<std::pair<double, double>>& curve) {
  if (curve.size() < 4) raise(ErrorKind::usage, kStage, "rate fit needs at least 4 points");
  std::vector<double> x, y;
  for (const auto& [e, v] : curve) {
    if (!(v > 0.0)) raise(ErrorKind::usage, kStage, "rate fit needs positive errors");
    x.push_back(e);
    y.push_back(v);
  }
  return fit_loglog(x, y);
}

Certificate scaled_certificate(const std::vector<double>& eps, const std::vector<double>& E) {
  std::vector<double> scaled;
  for (std::size_t i = 0; i < eps.size(); ++i) scaled.push_back(eps[i] * eps[i] * E[i]);
  Certificate c;
  c.scaled_slope = fit_loglog(eps, scaled).slope;
  c.first = scaled.front();
  c.last = scaled.back();
  c.slope_ok = c.scaled_slope >= 0.8 && c.scaled_slope <= 1.15;
  c.decay_ok = c.last < c.first / 4.0;
  c.pass = c.slope_ok && c.decay_ok;
  return c;
}

}  // namespace convhom

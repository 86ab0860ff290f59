#include "convhom/fixtures.hpp"

#include <functional>
#include <map>

namespace convhom {

namespace {

Coord vec(std::initializer_list<double> v) {
  Coord c(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) c(i++) = x;
  return c;
}

RMatrix iso(int d, double sigma) { return sigma * sigma * RMatrix::Identity(d, d); }

ProblemOptions opts(int n) {
  ProblemOptions o;
  o.n = n;
  return o;
}

// Zero-mean two-gaussian mixture: weights (1-p, p), means -pL e and (1-p)L e.
KernelSpec skew_mixture(const Coord& e, double p, double L, double sigma) {
  const int d = static_cast<int>(e.size());
  return KernelSpec::mixture({KernelSpec::gaussian(-p * L * e, iso(d, sigma), 1.0 - p),
                              KernelSpec::gaussian((1.0 - p) * L * e, iso(d, sigma), p)});
}

TrigPolynomial sine_factor(int d, double amp) {
  TrigPolynomial f;
  TrigMode m;
  m.k.assign(static_cast<std::size_t>(d), 0);
  m.k[0] = 1;
  m.sin_coeff = amp;
  f.modes.push_back(m);
  return f;
}

MuSpec exptrig(int d) {
  ExpTrigTerm t;
  t.beta = 0.4;
  t.trig = Trig::cos;
  if (d == 1) {
    t.kx = {1};
    t.ky = {-2};
  } else {
    t.kx = {1, 1};
    t.ky = {-2, 1};
  }
  return MuSpec::exp_trig(d, {t});
}

using Maker = std::function<Fixture()>;

const std::map<std::string, Maker>& registry() {
  static const std::map<std::string, Maker> reg = {
      {"gauss_mu1_1d",
       [] {
         return Fixture{"gauss_mu1_1d", "centered gaussian sigma=0.3, mu=1",
                        KernelSpec::gaussian(vec({0.0}), iso(1, 0.3)), MuSpec::constant(1), opts(128)};
       }},
      {"shifted_gauss_mu1_1d",
       [] {
         return Fixture{"shifted_gauss_mu1_1d", "gaussian center 0.3 sigma=0.3, mu=1",
                        KernelSpec::gaussian(vec({0.3}), iso(1, 0.3)), MuSpec::constant(1), opts(128)};
       }},
      {"box_mu1_1d",
       [] {
         Fixture f{"box_mu1_1d", "box halfwidth 1/2, mu=1", KernelSpec::box(vec({0.0}), vec({0.5})),
                  MuSpec::constant(1), opts(64)};
        // Discrete moments of a discontinuous density carry O(h^2) error.
        f.options.assembly.moment_rel = 1e-2;
        return f;
       }},
      {"exponential_mu1_1d",
       [] {
         Fixture f{"exponential_mu1_1d", "Laplace kernel rate 4 center 0.1, mu=1",
                   KernelSpec::exponential(vec({0.1}), 4.0), MuSpec::constant(1), opts(128)};
         // The kink of the density limits midpoint quadrature to O(h^2).
         f.options.assembly.potential_rel = 1e-3;
         f.options.assembly.schur_rel = 1e-3;
         f.options.assembly.moment_rel = 1e-2;
         return f;
       }},
      {"exptrig_gauss_1d",
       [] {
         return Fixture{"exptrig_gauss_1d", "centered gaussian sigma=0.3, mu=exp(0.4 cos 2pi(x-2y))",
                        KernelSpec::gaussian(vec({0.0}), iso(1, 0.3)), exptrig(1), opts(128)};
       }},
      {"exptrig_gauss_2d",
       [] {
         return Fixture{"exptrig_gauss_2d", "centered gaussian sigma=0.3 I, mu=exp(0.4 cos 2pi(x1+x2-2y1+y2))",
                        KernelSpec::gaussian(vec({0.0, 0.0}), iso(2, 0.3)), exptrig(2), opts(24)};
       }},
      {"separable_gauss_1d",
       [] {
         TrigPolynomial f = sine_factor(1, 0.3);
         TrigPolynomial g;
         g.modes.push_back(TrigMode{{1}, 0.3, 0.0});
         return Fixture{"separable_gauss_1d", "gaussian center 0.1 sigma=0.3, mu=(1+0.3 sin 2pi x)(1+0.3 cos 2pi y)",
                        KernelSpec::gaussian(vec({0.1}), iso(1, 0.3)), MuSpec::separable(1, f, g), opts(128)};
       }},
      {"skew_separable_1d",
       [] {
         return Fixture{"skew_separable_1d",
                        "zero-mean skewed gaussian mixture (0.9, 0.1) at (-0.05, 0.45), sigma=0.05, mu=1+0.3 sin 2pi x",
                        skew_mixture(vec({1.0}), 0.1, 0.5, 0.05), MuSpec::separable(1, sine_factor(1, 0.3), {}),
                        opts(128)};
       }},
      {"skew_separable_2d",
       [] {
         return Fixture{"skew_separable_2d",
                        "zero-mean skewed gaussian mixture along (0.8, 0.6), L=1, sigma=0.12, mu=1+0.3 sin 2pi x1",
                        skew_mixture(vec({0.8, 0.6}), 0.1, 1.0, 0.12), MuSpec::separable(2, sine_factor(2, 0.3), {}),
                        opts(24)};
       }},
  };
  return reg;
}

}  // namespace

std::vector<std::string> fixture_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

Fixture make_fixture(const std::string& name) {
  const auto& reg = registry();
  const auto it = reg.find(name);
  if (it == reg.end()) raise(ErrorKind::configuration, "fixtures", "unknown fixture '" + name + "'");
  return it->second();
}

}  // namespace convhom

#pragma once

#include "convhom/common.hpp"

#include <Eigen/SVD>

#include <doctest.h>

#include <cmath>
#include <initializer_list>

namespace testing {

inline convhom::Coord vec(std::initializer_list<double> v) {
  convhom::Coord c(static_cast<convhom::Index>(v.size()));
  convhom::Index i = 0;
  for (double x : v) c(i++) = x;
  return c;
}

inline convhom::RMatrix iso(int d, double sigma) { return sigma * sigma * convhom::RMatrix::Identity(d, d); }

// Largest singular value by a dense SVD, independent of the library's power iteration.
inline double svd_norm(const convhom::CMatrix& m) {
  Eigen::JacobiSVD<convhom::CMatrix> svd(m);
  return svd.singularValues()(0);
}

template <class F>
convhom::ErrorKind error_kind(F&& f) {
  try {
    f();
  } catch (const convhom::Error& e) {
    return e.kind();
  }
  FAIL("expected convhom::Error");
  return convhom::ErrorKind::usage;
}

}  // namespace testing

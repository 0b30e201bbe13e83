#include "wavelab/radial.hpp"

#include "wavelab/fft.hpp"

#include <cmath>
#include <map>

namespace wavelab {

SineDVR make_sine_dvr(double R, double dr) {
  if (!(R > 0.0) || !(dr > 0.0) || dr >= R) throw std::invalid_argument("make_sine_dvr: need 0 < dr < R");
  SineDVR d;
  d.R = R;
  d.N = int(std::lround(R / dr)) - 1;
  if (d.N < 2) throw std::invalid_argument("make_sine_dvr: fewer than two points");
  const int N = d.N;
  d.r.resize(N);
  d.k.resize(N);
  d.S.resize(N, N);
  for (int j = 0; j < N; ++j) {
    d.r[j] = (j + 1) * R / (N + 1);
    d.k[j] = (j + 1) * pi / R;
    for (int k = 0; k < N; ++k)
      d.S(j, k) = std::sqrt(2.0 / (N + 1)) * std::sin(pi * (j + 1) * (k + 1) / (N + 1));
  }
  return d;
}

Eigen::MatrixXd SineDVR::kinetic() const {
  return S * k.array().square().matrix().asDiagonal() * S.transpose();
}

Eigen::MatrixXcd SineDVR::coefficients(const Eigen::MatrixXcd& values) const {
  // f_j = sum_k a_k sin(pi j k/(N+1)), and S is its own inverse up to scale
  return std::sqrt(2.0 / (N + 1)) * (S.cast<cplx>() * values);
}

Eigen::MatrixXd SineDVR::basis_at(const Eigen::VectorXd& radii) const {
  Eigen::MatrixXd B(radii.size(), N);
  for (Index i = 0; i < radii.size(); ++i)
    for (int j = 0; j < N; ++j) B(i, j) = std::sin(k[j] * radii[i]);
  return B;
}

Eigen::MatrixXd radial_hamiltonian(const SineDVR& dvr, int l, const std::function<double(double)>& V) {
  Eigen::MatrixXd H = dvr.kinetic();
  for (int j = 0; j < dvr.N; ++j) {
    const double r = dvr.r[j];
    H(j, j) += l * (l + 1.0) / (r * r) + V(r);
  }
  return H;
}

Eigen::VectorXcd spherical_harmonics(int lmax, double cos_theta, double phi) {
  if (lmax < 0) throw std::invalid_argument("spherical_harmonics: lmax must be >= 0");
  const double x = std::clamp(cos_theta, -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  // normalized associated Legendre functions P~_l^m with Y_lm = P~_l^m e^{i m phi}
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(lmax + 1, lmax + 1);
  P(0, 0) = 1.0 / std::sqrt(4.0 * pi);
  for (int m = 1; m <= lmax; ++m) P(m, m) = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * P(m - 1, m - 1);
  for (int m = 0; m < lmax; ++m) P(m + 1, m) = std::sqrt(2.0 * m + 3.0) * x * P(m, m);
  for (int m = 0; m <= lmax; ++m)
    for (int l = m + 2; l <= lmax; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      P(l, m) = a * (x * P(l - 1, m) - b * P(l - 2, m));
    }
  Eigen::VectorXcd Y(Index(lmax + 1) * (lmax + 1));
  for (int l = 0; l <= lmax; ++l)
    for (int m = 0; m <= l; ++m) {
      const cplx y = P(l, m) * std::exp(cplx(0.0, m * phi));
      Y[harmonic_index(l, m)] = y;
      if (m > 0) Y[harmonic_index(l, -m)] = (m % 2 ? -1.0 : 1.0) * std::conj(y);
    }
  return Y;
}

Eigen::MatrixXcd project_partial_waves(const ComplexField& psi_hat, int lmax,
                                       const Eigen::VectorXd& radii, double r_cut) {
  const Grid3& g = psi_hat.grid;
  const Index nh = Index(lmax + 1) * (lmax + 1);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(radii.size(), nh);
  const double norm = 1.0 / std::pow(2.0 * g.L, 3);
  const double tiny = 1e-300;
  double amax = psi_hat.values.cwiseAbs().maxCoeff();
  if (!(amax > 0.0)) return u;

  std::vector<Index> active;
  for (Index i = 0; i < radii.size(); ++i)
    if (radii[i] <= r_cut) active.push_back(i);

  std::vector<cplx> il(lmax + 1);
  for (int l = 0; l <= lmax; ++l) il[l] = std::pow(cplx(0.0, 1.0), l);

  // spherical Bessel values per distinct |k|, which are integer multiples of dk^2
  std::map<long, Eigen::MatrixXd> bessel;
  auto table = [&](double kn) -> const Eigen::MatrixXd& {
    const long key = std::lround(kn * kn / (g.dk() * g.dk()));
    auto it = bessel.find(key);
    if (it != bessel.end()) return it->second;
    Eigen::MatrixXd J(active.size(), lmax + 1);
    for (std::size_t a = 0; a < active.size(); ++a)
      for (int l = 0; l <= lmax; ++l) {
        const double x = kn * radii[active[a]];
        J(Index(a), l) = x == 0.0 ? (l == 0 ? 1.0 : 0.0) : std::sph_bessel(unsigned(l), x);
      }
    return bessel.emplace(key, std::move(J)).first->second;
  };

  Eigen::VectorXcd coef(nh);
  for (Index idx = 0; idx < g.size(); ++idx) {
    const cplx c = psi_hat[idx];
    if (std::abs(c) <= 1e-15 * amax + tiny) continue;
    const Eigen::Vector3d kv = g.wavevector(idx);
    const double kn = kv.norm();
    const Eigen::VectorXcd Y = kn > 0.0 ? spherical_harmonics(lmax, kv[2] / kn, std::atan2(kv[1], kv[0]))
                                        : spherical_harmonics(lmax, 1.0, 0.0);
    const Eigen::MatrixXd& J = table(kn);
    const cplx w = 4.0 * pi * norm * c;
    for (int l = 0; l <= lmax; ++l)
      for (int m = -l; m <= l; ++m) coef[harmonic_index(l, m)] = w * il[l] * std::conj(Y[harmonic_index(l, m)]);
    for (std::size_t a = 0; a < active.size(); ++a) {
      const double r = radii[active[a]];
      auto row = u.row(active[a]);
      for (int l = 0; l <= lmax; ++l) {
        const double jr = J(Index(a), l) * r;
        if (jr == 0.0) continue;
        const Index lo = harmonic_index(l, -l);
        row.segment(lo, 2 * l + 1) += jr * coef.segment(lo, 2 * l + 1).transpose();
      }
    }
  }
  return u;
}

ComplexField reconstruct_partial_waves(const Grid3& grid, const SineDVR& dvr,
                                       const Eigen::MatrixXcd& u, int lmax) {
  const Index nh = Index(lmax + 1) * (lmax + 1);
  if (u.rows() != dvr.N || u.cols() < nh)
    throw std::invalid_argument("reconstruct_partial_waves: shape mismatch");
  // odd l: u/r is odd in r and has the smooth sine series, even l: u itself
  Eigen::MatrixXcd v = u.leftCols(nh);
  for (int l = 1; l <= lmax; l += 2)
    for (int m = -l; m <= l; ++m) v.col(harmonic_index(l, m)).array() /= dvr.r.array().cast<cplx>();
  const Eigen::MatrixXcd a = dvr.coefficients(v);

  // u/r at each distinct lattice radius
  std::map<long, Index> slot;
  std::vector<double> radii;
  for (Index idx = 0; idx < grid.size(); ++idx) {
    const Eigen::Vector3d x = grid.point(idx);
    const long key = std::lround(x.squaredNorm() / (grid.h * grid.h) * 4.0);
    if (slot.emplace(key, Index(radii.size())).second) radii.push_back(x.norm());
  }
  Eigen::VectorXd rv = Eigen::Map<Eigen::VectorXd>(radii.data(), Index(radii.size()));
  for (Index i = 0; i < rv.size(); ++i)
    if (rv[i] > dvr.R) throw std::invalid_argument("reconstruct_partial_waves: grid extends past R");
  Eigen::MatrixXcd ur = dvr.basis_at(rv).cast<cplx>() * a;  // u at radii
  for (Index i = 0; i < rv.size(); ++i) {
    if (rv[i] > 0.0) {
      for (int l = 0; l <= lmax; l += 2)
        for (int m = -l; m <= l; ++m) ur(i, harmonic_index(l, m)) /= rv[i];
    } else {
      // u/r -> u'(0) = sum a_k k for l = 0; higher l vanish
      ur.row(i).setZero();
      ur(i, 0) = (dvr.k.cast<cplx>().transpose() * a.col(0))(0);
    }
  }
  ComplexField out(grid);
  for (Index idx = 0; idx < grid.size(); ++idx) {
    const Eigen::Vector3d x = grid.point(idx);
    const double r = x.norm();
    const Index s = slot.at(std::lround(x.squaredNorm() / (grid.h * grid.h) * 4.0));
    const Eigen::VectorXcd Y = r > 0.0 ? spherical_harmonics(lmax, x[2] / r, std::atan2(x[1], x[0]))
                                       : spherical_harmonics(lmax, 1.0, 0.0);
    out[idx] = (ur.row(s) * Y)(0);
  }
  return out;
}

}  // namespace wavelab

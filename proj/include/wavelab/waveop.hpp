#pragma once

#include "wavelab/quadrature.hpp"
#include "wavelab/radial.hpp"
#include "wavelab/resolvent.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace wavelab {

enum class Route { time_limit, stationary, kernel_split };

Route parse_route(const std::string& s);
std::string route_name(Route r);

// psi -> Omega_+ beta(|P| <= M) psi on a grid, applied to batches.
class WaveOperatorRoute {
 public:
  virtual ~WaveOperatorRoute() = default;

  virtual Route route() const = 0;
  virtual std::vector<ComplexField> apply(const std::vector<ComplexField>& psi) const = 0;
  ComplexField apply(const ComplexField& psi) const { return apply(std::vector{psi}).front(); }

  // (Omega_+ - P_c) beta psi
  std::vector<ComplexField> apply_scattered(const std::vector<ComplexField>& psi) const;

  const Grid3& grid() const { return grid_; }
  double M() const { return M_; }
  const ContinuousProjection& projection() const { return *pc_; }
  std::shared_ptr<const ContinuousProjection> projection_ptr() const { return pc_; }

 protected:
  WaveOperatorRoute(const Potential& V, double M, std::shared_ptr<const ContinuousProjection> pc);
  ComplexField filtered(const ComplexField& psi) const;  // beta psi, grid-checked

  Grid3 grid_;
  double M_;
  std::shared_ptr<const ContinuousProjection> pc_;
};

// Resolvent contexts R^-(q_i^2) for a list of q, kept while they fit in a
// memory budget and rebuilt on demand otherwise.
class ContextCache {
 public:
  ContextCache(const Potential& V, std::vector<double> qs, std::shared_ptr<const ContinuousProjection> pc,
               const ResolventOptions& opt, double budget_mb);

  std::shared_ptr<const ResolventContext> get(std::size_t i) const;
  std::size_t size() const { return qs_.size(); }
  double q(std::size_t i) const { return qs_[i]; }
  std::size_t cached() const;

 private:
  Potential V_;
  std::vector<double> qs_;
  std::shared_ptr<const ContinuousProjection> pc_;
  ResolventOptions opt_;
  double budget_mb_;
  mutable std::shared_ptr<const ResolventContext> first_;
  mutable std::vector<std::shared_ptr<const ResolventContext>> kept_;
  mutable double used_mb_ = 0.0;
  mutable std::mutex mu_;
};

struct StationaryOptions {
  ResolventOptions resolvent;
  double cache_budget_mb = 1200.0;
  // q lattice of the box widened this many times (1: the grid's own lattice)
  int spectral_pad = 1;
};

// Omega_+ beta psi = P_c beta psi - (2L')^{-3} sum_q beta(|q|) psi^(q) P_c R^-(|q|^2) V e_q
// over the dual lattice of the box widened to L' = spectral_pad L; modes are
// grouped in shells of equal |q|.
class StationaryWaveOperator : public WaveOperatorRoute {
 public:
  StationaryWaveOperator(const Potential& V, double M, std::shared_ptr<const ContinuousProjection> pc = nullptr,
                         const StationaryOptions& opt = {});

  Route route() const override { return Route::stationary; }
  using WaveOperatorRoute::apply;
  std::vector<ComplexField> apply(const std::vector<ComplexField>& psi) const override;

  // beta Omega_+^* phi, the grid adjoint of apply.
  std::vector<ComplexField> apply_adjoint(const std::vector<ComplexField>& phi) const;
  ComplexField apply_adjoint(const ComplexField& phi) const { return apply_adjoint(std::vector{phi}).front(); }

  std::size_t shell_count() const { return shells_.size(); }
  const Grid3& spectral_grid() const { return spec_grid_; }

 private:
  struct Shell {
    double q;
    std::vector<Index> modes;  // FFT slots of spec_grid_ with |k| = q
  };
  Grid3 spec_grid_;
  std::vector<Shell> shells_;
  Eigen::VectorXd beta_;  // beta(|k| <= M) per slot
  std::unique_ptr<ContextCache> cache_;
};

struct TimeLimitOptions {
  double T = 64.0;
  double eps_factor = 4.0;  // eps = eps_factor / T
  bool richardson = true;   // 2 A(2T, eps/2) - A(T, eps)
  double dr = 0.25;
  int lmax = 12;
  double l_tol = 1e-5;      // stop after two channels below l_tol * ||beta psi||
  double tail_tol = 1e-3;   // bound on e^{-eps T} ||V e^{-i T H0} beta psi|| / ||beta psi||
  double eps_bs = 1e-6;
  int spectral_pad = 2;     // beta psi is taken on a box this many times wider
};

struct TimeLimitDiagnostics {
  double R = 0.0;
  int N = 0;
  int l_used = 0;
  double tail = 0.0;
  double last_channel = 0.0;  // ||correction in the last channel|| / ||beta psi||
};

class TailError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cook form  P_c psi + i int_0^T e^{-eps t} P_c e^{itH} V e^{-itH0} psi dt  evaluated
// per partial wave with exact (eigendecomposition) radial propagators.
class TimeLimitWaveOperator : public WaveOperatorRoute {
 public:
  TimeLimitWaveOperator(const Potential& V, double M, std::shared_ptr<const ContinuousProjection> pc = nullptr,
                        const TimeLimitOptions& opt = {});

  Route route() const override { return Route::time_limit; }
  using WaveOperatorRoute::apply;
  std::vector<ComplexField> apply(const std::vector<ComplexField>& psi) const override;

  const TimeLimitDiagnostics& diagnostics() const { return diag_; }
  const TimeLimitOptions& options() const { return opt_; }

 private:
  struct Channel {
    Eigen::MatrixXcd A;       // correction operator on DVR values
    Eigen::MatrixXd free_vecs;
    Eigen::VectorXd free_vals;
  };
  const Channel& channel(int l) const;

  PotentialFamily family_;
  double coupling_, width_;
  TimeLimitOptions opt_;
  SineDVR dvr_;
  mutable std::map<int, Channel> channels_;
  mutable TimeLimitDiagnostics diag_;
};

struct KernelSplitOptions {
  int nodes_per_panel = 16;
  ResolventOptions resolvent;
  double cache_budget_mb = 1200.0;
};

struct SplitParts {
  ComplexField I1, I2;
};

// (Omega_+ - P_c) beta psi = I1 + I2 with, for g_q = int psi(y) 4 pi sinc(q|. - y|) dy,
//   I1 = -(2 pi)^{-3} int q^2 beta(q) R0^-(q^2) P_c V g_q dq
//   I2 = +(2 pi)^{-3} int q^2 beta(q) R0^-(q^2) V R^-(q^2) P_c V g_q dq.
class KernelSplitWaveOperator : public WaveOperatorRoute {
 public:
  KernelSplitWaveOperator(const Potential& V, double M, std::shared_ptr<const ContinuousProjection> pc = nullptr,
                          const KernelSplitOptions& opt = {});

  Route route() const override { return Route::kernel_split; }
  using WaveOperatorRoute::apply;
  std::vector<ComplexField> apply(const std::vector<ComplexField>& psi) const override;
  std::vector<SplitParts> parts(const std::vector<ComplexField>& psi) const;

 private:
  GaussRule rule_;
  std::unique_ptr<ContextCache> cache_;
};

std::unique_ptr<WaveOperatorRoute> make_route(Route r, const Potential& V, double M,
                                              std::shared_ptr<const ContinuousProjection> pc = nullptr);

// |x| (Omega_+ - P_c) beta psi - (Omega_+ - P_c) beta (|y| psi); throws if |y| psi
// is not negligible at the box boundary (boundary_ratio above `boundary_tol`).
std::vector<ComplexField> commutator_x(const WaveOperatorRoute& op, const std::vector<ComplexField>& psi,
                                       double boundary_tol = 1e-3);

}  // namespace wavelab

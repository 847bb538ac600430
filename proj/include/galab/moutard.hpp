#pragma once

#include <functional>
#include <span>
#include <vector>

#include "galab/field.hpp"
#include "galab/potential.hpp"

namespace galab {

struct SeedPair {
  Field f;       // solves dbar f = u conj(f)
  Field f_plus;  // solves dbar f+ = -conj(u) conj(f+)
};

/// Seeds of a rank-N transform with their potential matrix:
/// omega[j][k] = omega_{f_k, f_j+} (row j follows f_j+, column k follows f_k).
struct SeedSet {
  Field u;
  std::vector<SeedPair> seeds;
  std::vector<std::vector<Potential>> omega;
  NodeIndex basepoint;

  int size() const { return static_cast<int>(seeds.size()); }
};

/// Builds every omega_{f_k, f_j+} by quadrature. `constants[j][k]` fixes the
/// value of entry (j, k) at the basepoint; missing entries are 0.
SeedSet make_seed_set(Field u, std::vector<SeedPair> seeds, NodeIndex basepoint,
                      const std::vector<std::vector<cplx>>& constants = {}, const OmegaOptions& options = {});

/// Largest residual of any seed in its own equation.
double max_seed_residual(const SeedSet& set);

struct TransformResult {
  using Map = std::function<Field(const Field&, std::span<const Potential>)>;

  Field u_tilde;
  /// psi -> psi~ given omega_{psi, f_j+} for j = 1..N.
  Map map_psi;
  /// psi+ -> psi+~ given omega_{f_k, psi+} for k = 1..N.
  Map map_psi_plus;

  int N = 0;
  double det_omega_min = 0.0;
  double det_tol = 0.0;

  /// Seeds on the input side, used to build the potentials for apply_*.
  std::vector<SeedPair> seeds;
  NodeIndex basepoint;

  /// map_psi with omega_{psi, f_j+} integrated from the basepoint, taking
  /// the value constants[j] there (default 0).
  Field apply_psi(const Field& psi, std::span<const cplx> constants = {}) const;
  Field apply_psi_plus(const Field& psi_plus, std::span<const cplx> constants = {}) const;
};

/// N = 1 transform:
///   u~   = u + f conj(f+) / omega
///   psi~ = psi - f omega_{psi, f+} / omega
///   psi+~ = psi+ - f+ omega_{f, psi+} / omega
/// Throws ZeroPotentialError where |omega| <= 1e-8 max |omega|.
TransformResult moutard_simple(const Field& u, const Field& f, const Field& f_plus, const Potential& omega_ff,
                               NodeIndex basepoint = {});

/// Rank-N transform u~ = u + f^T Omega^{-1} conj(f+) with the matching
/// solution maps. Throws SingularOmegaError where |det Omega| <= 1e-8 s^N,
/// s = max |Omega_jk| over the grid.
TransformResult moutard_rank_n(const SeedSet& set);

/// Potential of the transformed pair (psi~, psi+~):
///   (omega_pp omega_ff - omega_pf omega_fp) / omega_ff + c
/// with omega_pf = omega_{psi, f+} and omega_fp = omega_{f, psi+}.
Potential transformed_potential(const Potential& omega_pp, const Potential& omega_pf, const Potential& omega_fp,
                                const Potential& omega_ff, cplx c = 0.0);

/// Basepoint constants of the first-stage potentials of a two-step transform.
struct ComposeConstants {
  cplx f1_f1p{};  // omega_{f1, f1+}
  cplx f2_f1p{};  // omega_{f2, f1+}
  cplx f1_f2p{};  // omega_{f1, f2+}
  cplx f2_f2p{};  // omega_{f2, f2+}
  /// Constant added when transporting potentials through the first step; the
  /// matching rank-two transform has omega_{f2, f2+} shifted by it.
  cplx second_stage{};
};

/// First step M1 with seeds (f1, f1+), then M2 on the images (M1 f2, M1 f2+)
/// with potentials carried over by transformed_potential(). The maps take
/// the potentials of the original psi against (f1+, f2+), resp. (f1, f2).
TransformResult compose_simple(const Field& u, const SeedPair& first, const SeedPair& second, NodeIndex basepoint,
                               const ComposeConstants& constants = {}, const OmegaOptions& options = {});

/// Undoes M1 = moutard_simple(u, f1, f1+, omega) by the simple transform with
/// seeds -i f1/omega, -i f1+/omega and potential 1/omega. The maps take the
/// transformed solution and the potential of the original solution against
/// f1+ (resp. f1 against the original psi+).
TransformResult invert_simple(const TransformResult& m1, const Field& f1, const Field& f1_plus,
                              const Potential& omega_ff);

}  // namespace galab

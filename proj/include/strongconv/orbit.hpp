#pragma once

// Unitary-orbit pseudometric
//   d_orb(A, B) = inf_U ( sum_j ||U A_j U^* - B_j||_2^2 )^{1/2},
// with ||C||_2 = sqrt(tr C^* C) and tr = Tr / k.
//
// The optimizer only ever certifies UPPER bounds; exact values exist for
// single Hermitian pairs (sorted-eigenvalue alignment), and dorb_lower gives a
// certified floor.

#include <span>
#include <string>
#include <vector>

#include "strongconv/ensembles.hpp"
#include "strongconv/mattuple.hpp"

namespace strongconv {

enum class Certification { exact, upper_bound };

std::string to_string(Certification c);

struct OrbitOptions {
  int restarts = 8;        // identity, eigenbasis alignment, then Haar draws
  int max_iters = 2000;    // per restart
  double grad_tol = 1e-12;
  double armijo = 1e-4;
  SeedSpec seed{0x0bb17ULL, {}};
};

struct OrbitResult {
  double value = 0.0;
  Matrix minimizer;
  Certification certified = Certification::upper_bound;
  int restarts_used = 0;
  int iterations = 0;
  int best_restart = 0;
};

/// sqrt((1/k) sum_i (lambda_i(A) - lambda_i(B))^2) with both spectra ascending.
double dorb_exact_herm1(const Matrix& a, const Matrix& b);

/// g(U) = sum_j ||U A_j U^* - B_j||_2^2.
double orbit_objective(const MatTuple& a, const MatTuple& b, const Matrix& u);

/// Riemannian gradient of g at U in the left-trivialization: the skew-Hermitian
/// G with g(exp(t W) U) = g(U) + t Re Tr(G^* W) + O(t^2).
Matrix orbit_gradient(const MatTuple& a, const MatTuple& b, const Matrix& u);

/// Multi-start Riemannian descent with Cayley retraction and Armijo
/// backtracking (Barzilai-Borwein trial steps). Restarts run in index order and
/// the lowest value wins, ties going to the lower restart index. For a single
/// Hermitian pair the run stops once the exact value is reached.
OrbitResult dorb_upper(const MatTuple& a, const MatTuple& b, const OrbitOptions& opts = {});

/// Certified lower bound: per coordinate, the Hermitian and anti-Hermitian
/// parts each admit the exact single-matrix value, and separate optima can only
/// undercut the joint one.
double dorb_lower(const MatTuple& a, const MatTuple& b);

struct EntropyProbe {
  double epsilon = 0.0;
  int sample_count = 0;
  int cover_size = 0;
  double h_estimate = 0.0;  // log(cover_size) / k^2
};

enum class CoverDistance { exact_herm1, dorb_upper };

/// Greedy epsilon-net over the samples: a sample joins the net when it is
/// farther than epsilon from every current net point.
EntropyProbe covering_number(std::span<const MatTuple> samples, double epsilon, CoverDistance dist,
                             const OrbitOptions& opts = {});

}  // namespace strongconv

// Regenerates the checked-in golden fixtures from the brute-force dense
// operators. The PageRank golden is the time-averaged second-register
// distribution of 50 steps of W = S R S R over the Google matrix of the
// directed 4-cycle 0->1->2->3->0 with damping 0.85, computed entirely via
// explicit 16x16 operators and flat-vector evolution.
//
// Usage: szwalk_gen_fixtures <output-dir>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "szwalk/applications.hpp"
#include "szwalk/io.hpp"
#include "szwalk/reference.hpp"

using namespace szwalk;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: szwalk_gen_fixtures <output-dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);

  const Index n = 4;
  RealMatrix adjacency = RealMatrix::Zero(n, n);
  adjacency(1, 0) = 1.0;
  adjacency(2, 1) = 1.0;
  adjacency(3, 2) = 1.0;
  adjacency(0, 3) = 1.0;
  const TransitionMatrix g = build_google_matrix(adjacency, 0.85);
  io::write_matrix_csv((dir / "chain4_google.csv").string(), g.matrix());

  const reference::DenseOperator r = reference::dense_reflection(g);
  const reference::DenseOperator s = reference::dense_swap(n);
  const reference::DenseOperator w = s * r * s * r;

  ComplexVector v = ComplexVector::Zero(n * n);
  for (Index i = 0; i < n; ++i) {
    v += reference::flat_psi_vector(g, i);
  }
  v /= std::sqrt(static_cast<Real>(n));

  const int steps = 50;
  RealVector mean = RealVector::Zero(n);
  for (int t = 1; t <= steps; ++t) {
    v = w * v;
    mean += reference::flat_probabilities(v, Register::second);
  }
  mean /= static_cast<Real>(steps);

  io::write_ranking_csv((dir / "chain4_pagerank_golden.csv").string(),
                        ProbabilityVector::from_measurement(mean));
  std::cout << "fixtures written to " << dir << "\n";
  return 0;
}

// Every solution concept on one problem file, side by side.
//
//   compare_solutions samples/problems/pentagon.json [seed]

#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "fairshare/analysis.hpp"
#include "fairshare/io.hpp"
#include "fairshare/montecarlo.hpp"

using namespace fairshare;

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: compare_solutions PROBLEM.json [seed]\n";
    return 2;
  }
  try {
    const geometry::BargainingProblem problem = io::read_problem_file(argv[1]);
    analysis::Options opt;
    opt.spec = harmonic::GridSpec::with_spacing(1.0 / 128);
    for (auto m : {solutions::Method::Nash, solutions::Method::KalaiSmorodinsky, solutions::Method::Egalitarian,
                   solutions::Method::EqualLoss, solutions::Method::YuLp, solutions::Method::SDelta}) {
      const Payoff s = analysis::solve(m, problem, opt).payoff;
      std::printf("%-12s %.6f %.6f\n", std::string(solutions::to_string(m)).c_str(), s.u1, s.u2);
    }
    montecarlo::WalkConfig cfg;
    cfg.walkers = 20000;
    cfg.seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
    const solutions::Solution mc = montecarlo::estimate_s_delta_mc(problem, cfg);
    std::printf("%-12s %.6f %.6f  (stderr %.4f, %.0f walkers)\n", "s-delta-mc", mc.payoff.u1, mc.payoff.u2,
                mc.diagnostic("stderr1"), mc.diagnostic("walkers"));

    // Does perturbing the disagreement point pay?
    for (const char* solver : {"nash", "ks"}) {
      try {
        const auto r = analysis::isc_residual(solver, problem, analysis::kIscLadder);
        std::printf("%-12s isc %s / %s\n", solver, std::string(analysis::to_string(r.verdict[0])).c_str(),
                    std::string(analysis::to_string(r.verdict[1])).c_str());
      } catch (const Error& e) {
        std::printf("%-12s isc n/a (%s)\n", solver, e.what());
      }
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}

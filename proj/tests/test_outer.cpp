#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "proxmm/outer.hpp"
#include "proxmm/problems.hpp"

using namespace proxmm;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

OuterConfig fast_geometric(double kkt_tol, int r = 0) {
  OuterConfig cfg;
  cfg.c_schedule = CSchedule::geometric(1.0, 10.0, 1e10);
  cfg.eps_schedule = EpsSchedule{1e-2, 0.5};
  cfg.r = r;
  cfg.max_outer = 50;
  cfg.kkt_tol = kkt_tol;
  return cfg;
}

// Piecewise-constant quadrant image used as a clean denoising target.
Image quadrant_image(Index side) {
  Image img;
  img.side = side;
  img.pixels.resize(side * side);
  for (Index j = 0; j < side; ++j)
    for (Index i = 0; i < side; ++i)
      img.pixels[i + side * j] = ((i < side / 2) != (j < side / 2)) ? 0.75 : 0.25;
  return img;
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("schedules: frozen values and validation") {
  const CSchedule cs = CSchedule::geometric(2.0, 3.0, 10.0);
  CHECK(cs.at(0) == 2.0);
  CHECK(cs.at(1) == 6.0);
  CHECK(cs.at(2) == 10.0);  // capped from 18
  CHECK(CSchedule::constant(5.0).at(7) == 5.0);
  CHECK_THROWS_AS(CSchedule::geometric(0.0, 2.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(CSchedule::geometric(1.0, 0.5, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(CSchedule::geometric(4.0, 2.0, 1.0), std::invalid_argument);

  const EpsSchedule es{1e-2, 0.5};
  CHECK(es.at(2) == doctest::Approx(2.5e-3));
  OuterConfig bad;
  bad.r = 2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  OuterConfig bad_eps;
  bad_eps.eps_schedule.kappa = 1.0;
  CHECK_THROWS_AS(bad_eps.validate(), std::invalid_argument);
}

TEST_CASE("pmm converges in a few outer steps on a smooth quadratic") {
  // With phi = 0 each iteration is the exact proximal-point map toward x = b
  // and the multiplier stays at zero, so a fast-growing penalty wins quickly.
  const Vector b = vec({1.5, -0.5});
  const Problem p(SmoothSpec::quadratic(Matrix::Identity(2, 2), b), LinearOperator::identity(2),
                  ProxSpec::zero());
  OuterConfig cfg = fast_geometric(1e-8);
  cfg.c_schedule = CSchedule::geometric(10.0, 100.0, 1e12);
  const SolveResult r = pmm_solve(p, cfg, Vector::Zero(2), Vector::Zero(2));
  CHECK(r.trace.status == SolveStatus::Converged);
  CHECK(r.trace.rows.size() <= 4);
  CHECK((r.state.x - b).norm() <= 1e-8);
  CHECK(r.state.lambda.norm() == 0.0);
}

TEST_CASE("pmm matches the enumerated solution of a rank-deficient lasso") {
  // Rank-1 design: f is not strongly convex, the regime the proximal term is
  // there for.
  Matrix a(2, 2);
  a << 1.0, 2.0, 2.0, 4.0;
  const Vector b = vec({1.0, 2.0});
  const double alpha = 0.3;
  const Problem p = build_lasso(a, b, alpha);
  const auto oracle = oracles::lasso_sign_enum(a, b, alpha, 1e-10);
  REQUIRE(oracle.found);

  const SolveResult r = pmm_solve(p, fast_geometric(1e-9), Vector::Zero(2), Vector::Zero(2));
  CHECK(r.trace.status == SolveStatus::Converged);
  const KktResidual kkt = kkt_residual(p, r.state);
  CHECK(kkt.max() <= 1e-9);
  CHECK(std::abs(objective_value(p, r.state.x).value() - oracle.objective) <= 1e-8);
}

TEST_CASE("degenerate lasso: tight kkt within the outer budget") {
  // m = 4, n = 6 design of rank 2.
  std::mt19937_64 g(2718);
  const Matrix a = oracles::random_matrix(g, 4, 2) * oracles::random_matrix(g, 2, 6);
  const Vector b = oracles::random_vector(g, 4);
  const double alpha = 0.5;
  const Problem p = build_lasso(a, b, alpha);
  const auto oracle = oracles::lasso_sign_enum(a, b, alpha, 1e-9);
  REQUIRE(oracle.found);

  const SolveResult r = pmm_solve(p, fast_geometric(1e-8), Vector::Zero(6), Vector::Zero(6));
  CHECK(r.trace.status == SolveStatus::Converged);
  CHECK(r.trace.rows.size() <= 50);
  const KktResidual kkt = kkt_residual(p, r.state);
  CHECK(kkt.stationarity <= 1e-8);
  CHECK(kkt.feasibility <= 1e-8);
  CHECK(std::abs(objective_value(p, r.state.x).value() - oracle.objective) <= 1e-8);
}

TEST_CASE("pmm and admm agree on a denoising problem") {
  const Image clean = quadrant_image(8);
  const Image noisy = salt_pepper_noise(clean, 0.15, 3);
  const Problem p = build_l1tv(noisy, 1.5);

  const SolveResult pmm = pmm_solve(p, fast_geometric(1e-8), noisy.pixels, Vector::Zero(p.m()));
  CHECK(pmm.trace.status == SolveStatus::Converged);
  const KktResidual kkt = kkt_residual(p, pmm.state);
  CHECK(kkt.max() <= 1e-8);

  const AdmmResult admm =
      admm_solve(p, 4.0, 100000, 1e-9, noisy.pixels, p.e.apply(noisy.pixels), Vector::Zero(p.m()));
  CHECK(admm.trace.status == SolveStatus::Converged);
  const double obj_pmm = objective_value(p, pmm.state.x).value();
  const double obj_admm = objective_value(p, admm.state.x).value();
  CHECK(relative_gap(obj_pmm, obj_admm) <= 1e-6);
}

TEST_CASE("alm matches pmm when f is strongly convex, without any ridge") {
  std::mt19937_64 g(4);
  const Matrix a = oracles::random_matrix(g, 5, 3) + 2.0 * Matrix::Identity(5, 3);
  const Vector b = oracles::random_vector(g, 5);
  const Problem p = build_lasso(a, b, 0.4);

  const SolveResult pmm = pmm_solve(p, fast_geometric(1e-10), Vector::Zero(3), Vector::Zero(3));
  const SolveResult alm = alm_solve(p, fast_geometric(1e-10), Vector::Zero(3), Vector::Zero(3));
  CHECK(pmm.trace.status == SolveStatus::Converged);
  CHECK(alm.trace.status == SolveStatus::Converged);
  CHECK((pmm.state.x - alm.state.x).norm() <= 1e-8);
  for (const TraceRow& row : alm.trace.rows) CHECK(row.ridge_active == false);
}

TEST_CASE("alm flags the ridge on a problem with no smooth curvature") {
  Image y = quadrant_image(4);
  y.pixels[5] = 1.0;
  y.pixels[10] = 0.0;
  const Problem p = build_l1tv(y, 1.5);

  const SolveResult alm = alm_solve(p, fast_geometric(1e-8), y.pixels, Vector::Zero(p.m()));
  REQUIRE(!alm.trace.rows.empty());
  for (const TraceRow& row : alm.trace.rows) CHECK(row.ridge_active == true);
  CHECK(alm.trace.status == SolveStatus::Converged);

  const SolveResult pmm = pmm_solve(p, fast_geometric(1e-8), y.pixels, Vector::Zero(p.m()));
  const double obj_alm = objective_value(p, alm.state.x).value();
  const double obj_pmm = objective_value(p, pmm.state.x).value();
  CHECK(relative_gap(obj_alm, obj_pmm) <= 1e-6);
}

TEST_CASE("alm multiplier iterates follow the positive-part update on the cone") {
  // min (x-1)^2/2 subject to x <= 0 has x* = 0, lambda* = 1; every multiplier
  // step must realize max(lambda + c x_next, 0).
  const Problem p(SmoothSpec::quadratic(Matrix::Identity(1, 1), vec({1.0})),
                  LinearOperator::identity(1), ProxSpec::indicator_nonpositive());
  OuterConfig cfg = fast_geometric(1e-10);
  cfg.record_iterates = true;
  const SolveResult r = alm_solve(p, cfg, vec({0.5}), vec({0.0}));
  CHECK(r.trace.status == SolveStatus::Converged);
  CHECK(std::abs(r.state.x[0]) <= 1e-8);
  CHECK(std::abs(r.state.lambda[0] - 1.0) <= 1e-6);

  Vector lambda_prev = vec({0.0});
  for (std::size_t k = 0; k < r.trace.rows.size(); ++k) {
    const double c = r.trace.rows[k].c;
    const Vector expect = (lambda_prev + c * r.trace.x_history[k]).cwiseMax(0.0);
    CHECK((r.trace.lambda_history[k] - expect).norm() <= 1e-12);
    lambda_prev = r.trace.lambda_history[k];
  }
}

TEST_CASE("admm with zero phi keeps the splitting tight and the multiplier at zero") {
  const Vector b = vec({2.0, -1.0, 0.5});
  const Problem p(SmoothSpec::quadratic(Matrix::Identity(3, 3), b), LinearOperator::identity(3),
                  ProxSpec::zero());

  const AdmmResult one =
      admm_solve(p, 1.0, 1, 1e-12, Vector::Zero(3), Vector::Zero(3), Vector::Zero(3));
  CHECK((one.v - p.e.apply(one.state.x)).norm() == 0.0);
  CHECK(one.state.lambda.norm() == 0.0);

  const AdmmResult full =
      admm_solve(p, 1.0, 10000, 1e-9, Vector::Zero(3), Vector::Zero(3), Vector::Zero(3));
  CHECK(full.trace.status == SolveStatus::Converged);
  CHECK((full.state.x - b).norm() <= 1e-8);
  CHECK(full.state.lambda.norm() == 0.0);
}

TEST_CASE("admm solves the scalar lasso") {
  const Problem p = build_lasso(Matrix::Identity(1, 1), vec({2.0}), 1.0);
  const AdmmResult r =
      admm_solve(p, 1.0, 100000, 1e-10, Vector::Zero(1), Vector::Zero(1), Vector::Zero(1));
  CHECK(r.trace.status == SolveStatus::Converged);
  CHECK(std::abs(r.state.x[0] - 1.0) <= 1e-8);
  CHECK(objective_value(p, r.state.x).value() == doctest::Approx(1.5));
}

TEST_CASE("forward-backward newton with zero phi finds the least-squares solution") {
  std::mt19937_64 g(6);
  const Matrix a = oracles::random_matrix(g, 4, 3) + Matrix::Identity(4, 3);
  const Vector b = oracles::random_vector(g, 4);
  const Problem p(SmoothSpec::quadratic(a, b), LinearOperator::identity(3), ProxSpec::zero());
  const Vector expect = (a.transpose() * a).ldlt().solve(a.transpose() * b);

  const double c = 2.0 * p.f.grad_lipschitz_upper();
  FbnConfig cfg;
  cfg.tol = 1e-12;
  const FbnResult r = fb_newton_solve(p, c, cfg);
  CHECK(r.trace.status == SolveStatus::Converged);
  CHECK((r.x - expect).norm() <= 1e-8);
}

TEST_CASE("forward-backward newton frozen scalar lasso and envelope identity") {
  const Problem p = build_lasso(Matrix::Identity(1, 1), vec({2.0}), 1.0);
  FbnConfig cfg;
  cfg.tol = 1e-12;
  const FbnResult r = fb_newton_solve(p, 2.0, cfg);
  CHECK(r.trace.status == SolveStatus::Converged);
  CHECK(std::abs(r.x[0] - 1.0) <= 1e-9);
  // At a stationary point the envelope value coincides with the objective.
  CHECK(std::abs(fb_envelope_value(p, 2.0, r.x) - 1.5) <= 1e-9);
  CHECK(std::abs(objective_value(p, r.x).value() - 1.5) <= 1e-9);
}

TEST_CASE("forward-backward newton rejects unsupported setups") {
  const Image y = quadrant_image(2);
  const Problem tv = build_l1tv(y, 1.0);
  CHECK_THROWS_AS((void)fb_newton_solve(tv, 10.0), std::invalid_argument);

  const Problem lasso = build_lasso(Matrix::Identity(2, 2), vec({1.0, 1.0}), 0.5);
  const double low_c = 0.5 * lasso.f.grad_lipschitz_upper() / 1.01;
  CHECK_THROWS_AS((void)fb_newton_solve(lasso, low_c), std::invalid_argument);
}

TEST_CASE("forward-backward newton matches the enumerated lasso oracle") {
  std::mt19937_64 g(11);
  for (int inst = 0; inst < 3; ++inst) {
    const Matrix a = oracles::random_matrix(g, 5, 3) + 1.5 * Matrix::Identity(5, 3);
    const Vector b = oracles::random_vector(g, 5);
    const double alpha = oracles::uniform(g, 0.2, 0.8);
    const Problem p = build_lasso(a, b, alpha);
    const auto oracle = oracles::lasso_sign_enum(a, b, alpha, 1e-10);
    REQUIRE(oracle.found);

    const double c = 2.0 * p.f.grad_lipschitz_upper();
    FbnConfig cfg;
    cfg.tol = 1e-10;
    const FbnResult r = fb_newton_solve(p, c, cfg);
    CHECK(r.trace.status == SolveStatus::Converged);
    const Vector res = r.x - prox_eval(p.phi, r.x - p.f.gradient(r.x) / c, c);
    CHECK(res.norm() <= 1e-9);
    CHECK((r.x - oracle.x).norm() <= 1e-8);
    CHECK(std::abs(fb_envelope_value(p, c, r.x) - objective_value(p, r.x).value()) <= 1e-9);
  }
}

TEST_CASE("pmm trace rows satisfy the realized stopping rule for r = 0 and r = 1") {
  std::mt19937_64 g(13);
  const Matrix a = oracles::random_matrix(g, 4, 4);
  const Vector b = oracles::random_vector(g, 4);
  const Problem p = build_lasso(a, b, 0.3);

  for (int r_exp : {0, 1}) {
    const OuterConfig cfg = fast_geometric(1e-9, r_exp);
    const SolveResult r = pmm_solve(p, cfg, Vector::Zero(4), Vector::Zero(4));
    CHECK(r.trace.status == SolveStatus::Converged);
    for (std::size_t k = 0; k < r.trace.rows.size(); ++k) {
      const TraceRow& row = r.trace.rows[k];
      CHECK(row.k == static_cast<int>(k));
      CHECK(row.c == cfg.c_schedule.at(row.k));
      CHECK(row.eps == cfg.eps_schedule.at(row.k));
      REQUIRE(row.inner_converged);
      const double allowance = r_exp == 0 ? 1.0 : std::min(1.0, row.step_norm);
      CHECK(row.inner_grad_norm <=
            (row.eps / row.c) * allowance * (1.0 + 1e-12) + 1e-300);
    }
  }
}

TEST_CASE("inexact outer steps stay within the proximal-point distance bound") {
  // Against a high-accuracy resolve of the same subproblem, the realized
  // update must sit within c_k ||grad psi|| of the exact proximal-point map.
  std::mt19937_64 g(21);
  const Matrix a = oracles::random_matrix(g, 4, 3) + 1.5 * Matrix::Identity(4, 3);
  const Vector b = oracles::random_vector(g, 4);
  const Problem p = build_lasso(a, b, 0.5);

  OuterConfig cfg;
  cfg.c_schedule = CSchedule::geometric(1.0, 2.0, 100.0);
  cfg.eps_schedule = EpsSchedule{1e-1, 0.3};
  cfg.max_outer = 8;
  cfg.kkt_tol = 1e-13;  // keep iterating through the budget
  cfg.record_iterates = true;
  const SolveResult r = pmm_solve(p, cfg, Vector::Zero(3), Vector::Zero(3));
  REQUIRE(r.trace.rows.size() >= 4);

  Vector x_prev = Vector::Zero(3);
  Vector lambda_prev = Vector::Zero(3);
  for (std::size_t k = 0; k < r.trace.rows.size(); ++k) {
    const double c = r.trace.rows[k].c;
    Subproblem sp;
    sp.problem = &p;
    sp.x_ref = x_prev;
    sp.lambda = lambda_prev;
    sp.c = c;
    InnerConfig tight;
    tight.max_iters = 300;
    const InnerResult exact = solve_subproblem(sp, 1e-13, tight);
    REQUIRE(exact.converged);
    const Vector lambda_exact =
        multiplier_update(p, IterateState{x_prev, lambda_prev, c}, exact.xi);

    const double dist =
        std::sqrt((r.trace.x_history[k] - exact.xi).squaredNorm() +
                  (r.trace.lambda_history[k] - lambda_exact).squaredNorm());
    CHECK(dist <= c * r.trace.rows[k].inner_grad_norm + 1e-9);
    x_prev = r.trace.x_history[k];
    lambda_prev = r.trace.lambda_history[k];
  }
}

TEST_CASE("recorded multiplier iterates match the conjugate prox formula") {
  Image y = quadrant_image(4);
  y.pixels[3] = 1.0;
  const Problem p = build_l1tv(y, 1.2);
  OuterConfig cfg = fast_geometric(1e-8);
  cfg.record_iterates = true;
  const SolveResult r = pmm_solve(p, cfg, y.pixels, Vector::Zero(p.m()));
  REQUIRE(r.trace.status == SolveStatus::Converged);
  REQUIRE(r.trace.x_history.size() == r.trace.rows.size());

  Vector lambda_prev = Vector::Zero(p.m());
  for (std::size_t k = 0; k < r.trace.rows.size(); ++k) {
    const double c = r.trace.rows[k].c;
    const Vector expect =
        conjugate_prox(p.phi, lambda_prev + c * p.e.apply(r.trace.x_history[k]), c);
    CHECK((r.trace.lambda_history[k] - expect).norm() <= 1e-10);
    lambda_prev = r.trace.lambda_history[k];
  }
}

TEST_CASE("the four solvers agree on a strongly convex lasso") {
  std::mt19937_64 g(29);
  const Matrix a = oracles::random_matrix(g, 4, 3) + 2.0 * Matrix::Identity(4, 3);
  const Vector b = oracles::random_vector(g, 4);
  const Problem p = build_lasso(a, b, 0.4);

  const double obj_pmm = objective_value(
      p, pmm_solve(p, fast_geometric(1e-9), Vector::Zero(3), Vector::Zero(3)).state.x).value();
  const double obj_alm = objective_value(
      p, alm_solve(p, fast_geometric(1e-9), Vector::Zero(3), Vector::Zero(3)).state.x).value();
  const double obj_admm = objective_value(
      p, admm_solve(p, 2.0, 100000, 1e-10, Vector::Zero(3), Vector::Zero(3), Vector::Zero(3))
             .state.x).value();
  FbnConfig fbn_cfg;
  fbn_cfg.tol = 1e-11;
  const double obj_fbn = objective_value(
      p, fb_newton_solve(p, 2.0 * p.f.grad_lipschitz_upper(), fbn_cfg).x).value();

  CHECK(relative_gap(obj_alm, obj_pmm) <= 1e-6);
  CHECK(relative_gap(obj_admm, obj_pmm) <= 1e-6);
  CHECK(relative_gap(obj_fbn, obj_pmm) <= 1e-6);
}

TEST_CASE("solver entry points validate their start iterates") {
  const Problem p = build_lasso(Matrix::Identity(2, 2), vec({1.0, 1.0}), 0.5);
  CHECK_THROWS_AS((void)pmm_solve(p, fast_geometric(1e-8), Vector::Zero(3), Vector::Zero(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)alm_solve(p, fast_geometric(1e-8), Vector::Zero(2), Vector::Zero(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)admm_solve(p, -1.0, 10, 1e-6, Vector::Zero(2), Vector::Zero(2),
                                   Vector::Zero(2)),
                  std::invalid_argument);
}

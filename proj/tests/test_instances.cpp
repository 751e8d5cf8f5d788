#include "helpers.hpp"

#include "dcmba/encoding.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace testutil;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("dcmba_test_" + name);
}

}  // namespace

TEST_CASE("Householder factor") {
  for (double ce : {2.0, 4.0, 10.0}) {
    SplitMix64 rng(77);
    const HouseholderFactor hf = gen_householder_factor(rng, 12, ce);
    const Matrix I = Matrix::Identity(12, 12);
    CHECK((hf.Y.transpose() * hf.Y - I).norm() < 1e-12);
    CHECK((hf.Y - hf.Y.transpose()).norm() < 1e-12);
    std::vector<double> d(hf.D_diag.begin(), hf.D_diag.end());
    std::sort(d.begin(), d.end());
    for (int j = 0; j < 12; ++j) CHECK(d[j] == std::pow(10.0, ce * j / 11.0));
    const Matrix Q = hf.B.transpose() * hf.B;
    const Eigen::SelfAdjointEigenSolver<Matrix> es(Q);
    CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(std::pow(10.0, ce)).epsilon(1e-9));
    if (ce <= 4.0) CHECK(es.eigenvalues().minCoeff() == doctest::Approx(1.0).epsilon(1e-9));
  }
  SplitMix64 rng(1);
  CHECK_THROWS_AS(gen_householder_factor(rng, 1, 4.0), std::invalid_argument);
}

TEST_CASE("x0 is feasible with g_i(x0) = -s_i") {
  for (double P : {0.0, 1e5}) {
    QCQPParams prm = QCQPParams::convex_l1(10, 4, 10.0, 5);
    prm.P_scale = P;
    const QCQPInstance inst = gen_qcqp(prm);
    const Vector g = inst.cons.value(inst.x0);
    CHECK(g.maxCoeff() <= 0.0);
    // Replay the constraint streams: Householder draws, h_i, then s_i.
    for (int i = 0; i < inst.m; ++i) {
      SplitMix64 r = SplitMix64(5).split(100 + static_cast<std::uint64_t>(i));
      gen_householder_factor(r, 10, prm.cond_exponent);
      for (int j = 0; j < 10; ++j) r.uniform();
      const double s = r.uniform();
      CHECK(g[i] == doctest::Approx(-s).epsilon(1e-9).scale(std::abs(inst.cons.d2[i])));
    }
  }
}

TEST_CASE("factored and expanded constraints agree; gradients match finite differences") {
  QCQPParams prm = QCQPParams::dc_l1l2(8, 3, 10.0, 9);
  const QCQPInstance inst = gen_qcqp(prm);
  SplitMix64 rng(4);
  for (int t = 0; t < 10; ++t) {
    Vector x(8);
    for (auto& v : x) v = rng.uniform(-2.0, 2.0);
    const Vector g = inst.cons.value(x);
    for (int i = 0; i < inst.m; ++i) {
      const double e = expand_constraint(inst.cons, i).value(x);
      CHECK(std::abs(g[i] - e) <= 1e-6 * std::max(1.0, std::abs(e)));
    }
    const Matrix J = inst.cons.jacobian(x);
    for (int i = 0; i < inst.m; ++i) {
      const Vector fd = central_diff([&](const Vector& z) { return inst.cons.value(z)[i]; }, x, 1e-5);
      CHECK(rel_err(J.row(i).transpose(), fd) < 1e-6);
    }
  }
}

TEST_CASE("QCQP objective") {
  const QCQPInstance inst = small_qcqp(3, 7, 2);
  CHECK(inst.Y0.rows() == 3);
  CHECK(inst.b0_unit.norm() == doctest::Approx(1.0));
  const ProblemSpec spec = make_problem(inst);
  const Vector x = inst.x0;
  CHECK(spec.f->value(x) == doctest::Approx((inst.Y0 * x).squaredNorm() + 2.0 * inst.omega0 * inst.b0_unit.dot(x)));
  const Vector fd = central_diff([&](const Vector& z) { return spec.f->value(z); }, x, 1e-6);
  CHECK(rel_err(spec.f->gradient(x), fd) < 1e-7);
  CHECK(spec.phi->value(x) == doctest::Approx(0.01 * x.lpNorm<1>()));
}

TEST_CASE("Student's t pieces") {
  CHECK(student_theta(Vector::Zero(3)) == 0.0);
  CHECK(student_theta_grad(Vector::Zero(3)).norm() == 0.0);
  CHECK(student_theta_grad(vec({0.5}))[0] == doctest::Approx(2.0));
  SplitMix64 rng(2);
  Vector u(5);
  for (auto& v : u) v = rng.uniform(-2.0, 2.0);
  const Vector fd = central_diff([](const Vector& z) { return student_theta(z); }, u, 1e-6);
  CHECK(rel_err(student_theta_grad(u), fd) < 1e-8);
  const Vector h = student_theta_hess(u);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const Vector fdi = central_diff([&](const Vector& z) { return student_theta_grad(z)[i]; }, u, 1e-6);
    CHECK(h[i] == doctest::Approx(fdi[i]).epsilon(1e-6));
  }

  const Matrix A = dct_rows(16, {0, 3, 7, 15});
  CHECK((A * A.transpose() - Matrix::Identity(4, 4)).norm() < 1e-10);
  CHECK_THROWS_AS(dct_rows(4, {4}), std::invalid_argument);

  const StudentTInstance inst = gen_student_t({});
  CHECK(inst.N == 10);
  CHECK(inst.J.size() == 10u);
  CHECK(std::is_sorted(inst.J.begin(), inst.J.end()));
  int nnz = 0;
  for (double v : inst.x_true) nnz += v != 0.0;
  CHECK(nnz == 2);
  CHECK(inst.cons.value(inst.x0).maxCoeff() <= 0.0);
  const ProblemSpec spec = make_problem(inst);
  const Vector gfd = central_diff([&](const Vector& z) { return spec.f->value(z); }, inst.x0, 1e-6);
  CHECK(rel_err(spec.f->gradient(inst.x0), gfd) < 1e-6);
  // A(x)^T A(x) = A^T diag([omega]_+) A
  const Matrix Ax = spec.curvature->operator_at(inst.x0);
  const Matrix Ad = dct_rows(inst.n, inst.J);
  const Vector om = student_theta_hess(Ad * inst.x0 - inst.b).cwiseMax(0.0);
  CHECK((Ax.transpose() * Ax - Ad.transpose() * om.asDiagonal() * Ad).norm() < 1e-10);
  StudentTParams small;
  small.n = 40;
  CHECK_THROWS_AS(gen_student_t(small), std::invalid_argument);
}

TEST_CASE("generation is a pure function of the seed") {
  const QCQPInstance a = small_qcqp(42), b = small_qcqp(42), c = small_qcqp(43);
  CHECK(instance_checksum(Instance(a)) == instance_checksum(Instance(b)));
  CHECK(instance_checksum(Instance(a)) != instance_checksum(Instance(c)));
  // Adding constraints leaves the earlier ones unchanged.
  const QCQPInstance more = small_qcqp(42, 6, 5);
  CHECK(more.cons.B[1] == a.cons.B[1]);
  CHECK(more.x0 == a.x0);
  // Pinned digest: catches any change in draw order or arithmetic.
  CHECK(instance_checksum(Instance(gen_qcqp(QCQPParams::convex_l1(4, 2, 10.0, 1)))) == "a7a5561de6d3329c");
}

TEST_CASE("instance files round-trip byte for byte") {
  for (const Instance& inst : {Instance(small_qcqp(8, 5, 2, 1e5, 0.01)), Instance(gen_student_t({}))}) {
    const auto p1 = temp_path("a.dcinst.json"), p2 = temp_path("b.dcinst.json");
    save_instance(inst, p1);
    const Instance back = load_instance(p1);
    save_instance(back, p2);
    CHECK(slurp(p1) == slurp(p2));
    CHECK(instance_checksum(back) == instance_checksum(inst));
    CHECK(instance_x0(back) == instance_x0(inst));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
  }
}

TEST_CASE("corrupt instance files are rejected") {
  const std::string text = serialize_instance(Instance(small_qcqp(1)));
  CHECK_THROWS_AS(parse_instance(text.substr(0, text.size() / 2)), ChecksumError);
  std::string flipped = text;
  const auto pos = flipped.find("\"omega0\": 10.0");
  REQUIRE(pos != std::string::npos);
  flipped.replace(pos, 14, "\"omega0\": 11.0");
  CHECK_THROWS_AS(parse_instance(flipped), ChecksumError);
  std::string versioned = text;
  const auto vp = versioned.find("\"version\": 1");
  REQUIRE(vp != std::string::npos);
  versioned.replace(vp, 12, "\"version\": 2");
  CHECK_THROWS_AS(parse_instance(versioned), VersionMismatchError);
  CHECK_THROWS_AS(parse_instance("{\"format\": \"other\"}"), InstanceFormatError);
}

TEST_CASE("base64 float arrays") {
  const std::vector<double> v{0.0, -1.5, 1e-300, 3.141592653589793};
  CHECK(decode_f64(encode_f64(v)) == v);
  CHECK(base64_encode("foobar") == "Zm9vYmFy");
  CHECK(base64_decode("Zm9vYg==") == "foob");
  CHECK_THROWS_AS(base64_decode("Zm9v!"), std::invalid_argument);
  // FNV-1a 64 reference values
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
}

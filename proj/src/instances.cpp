#include "dcmba/instances.hpp"

#include "dcmba/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace dcmba {

using nlohmann::json;

HouseholderFactor gen_householder_factor(SplitMix64& rng, int n, double cond_exponent) {
  if (n < 2) throw std::invalid_argument("gen_householder_factor: n must be >= 2");
  Vector y(n);
  for (int i = 0; i < n; ++i) y[i] = rng.uniform(-1.0, 1.0);
  HouseholderFactor out;
  out.Y = Matrix::Identity(n, n) - (2.0 / y.squaredNorm()) * (y * y.transpose());
  std::vector<double> diag(n);
  for (int j = 0; j < n; ++j) diag[j] = std::pow(10.0, cond_exponent * j / (n - 1));
  rng.shuffle(diag);
  out.D_diag = Eigen::Map<const Vector>(diag.data(), n);
  out.B = out.D_diag.cwiseSqrt().asDiagonal() * out.Y;
  return out;
}

double factored_quadratic(const Matrix& B, const Vector& h, double P, const Vector& x) {
  return (B * x + h).squaredNorm() - P * x.squaredNorm();
}

Vector FactoredConstraintSet::value(const Vector& x) const {
  Vector out(size());
  for (int i = 0; i < size(); ++i) out[i] = factored_quadratic(B[i], h[i], P_scale, x) - d2[i];
  return out;
}

Matrix FactoredConstraintSet::jacobian(const Vector& x) const {
  Matrix J(size(), x.size());
  for (int i = 0; i < size(); ++i) {
    J.row(i) = (2.0 * (B[i].transpose() * (B[i] * x + h[i])) - (2.0 * P_scale) * x).transpose();
  }
  return J;
}

ExpandedConstraint expand_constraint(const FactoredConstraintSet& cons, int i) {
  const Matrix& B = cons.B.at(i);
  ExpandedConstraint e;
  e.Q = B.transpose() * B;
  e.Q.diagonal().array() -= cons.P_scale;
  e.b = B.transpose() * cons.h[i];
  e.c = cons.h[i].squaredNorm() - cons.d2[i];
  return e;
}

QCQPParams QCQPParams::convex_l1(int n, int m, double omega0, std::uint64_t seed, double cond_exponent) {
  QCQPParams p;
  p.n = n;
  p.m = m;
  p.omega0 = omega0;
  p.P_scale = 0.0;
  p.phi_weight = 0.01;
  p.psi_weight = 0.0;
  p.cond_exponent = cond_exponent;
  p.seed = seed;
  return p;
}

QCQPParams QCQPParams::dc_l1l2(int n, int m, double omega0, std::uint64_t seed, double cond_exponent) {
  QCQPParams p = convex_l1(n, m, omega0, seed, cond_exponent);
  p.P_scale = 1e5;
  p.psi_weight = 0.01;
  return p;
}

namespace {

FactoredConstraintSet gen_constraints(const SplitMix64& root, int n, int m, double P_scale, double cond_exponent,
                                      const Vector& x0) {
  FactoredConstraintSet cons;
  cons.P_scale = P_scale;
  cons.d2.resize(m);
  for (int i = 0; i < m; ++i) {
    SplitMix64 rng = root.split(100 + static_cast<std::uint64_t>(i));
    HouseholderFactor hf = gen_householder_factor(rng, n, cond_exponent);
    Vector h(n);
    for (int j = 0; j < n; ++j) h[j] = rng.uniform(-1.0, 1.0);
    const double s = rng.uniform();
    // Same helper as FactoredConstraintSet::value, so g_i(x0) = fl(a - fl(a + s)) <= 0 exactly.
    cons.d2[i] = factored_quadratic(hf.B, h, P_scale, x0) + s;
    cons.B.push_back(std::move(hf.B));
    cons.h.push_back(std::move(h));
  }
  return cons;
}

Vector gen_x0(const SplitMix64& root, int n) {
  SplitMix64 rng = root.split(2);
  Vector x0(n);
  for (int j = 0; j < n; ++j) x0[j] = rng.uniform(-1.0, 1.0);
  return x0;
}

void check_dims(int n, int m, const char* what) {
  if (n < 2) throw std::invalid_argument(std::string(what) + ": n must be >= 2");
  if (m < 1) throw std::invalid_argument(std::string(what) + ": m must be >= 1");
}

}  // namespace

QCQPInstance gen_qcqp(const QCQPParams& params) {
  check_dims(params.n, params.m, "gen_qcqp");
  if (params.P_scale < 0.0 || params.phi_weight < 0.0 || params.psi_weight < 0.0) {
    throw std::invalid_argument("gen_qcqp: P_scale and weights must be >= 0");
  }
  const int n = params.n;
  const SplitMix64 root(params.seed);
  QCQPInstance inst;
  inst.n = n;
  inst.m = params.m;
  inst.omega0 = params.omega0;
  inst.phi_weight = params.phi_weight;
  inst.psi_weight = params.psi_weight;
  inst.seed = params.seed;
  inst.cond_exponent = params.cond_exponent;

  SplitMix64 obj = root.split(1);
  const int p = n / 2;
  inst.Y0.resize(p, n);
  for (int r = 0; r < p; ++r) {
    for (int c = 0; c < n; ++c) inst.Y0(r, c) = obj.normal();
  }
  Vector b0(n);
  for (int j = 0; j < n; ++j) b0[j] = obj.normal();
  inst.b0_unit = b0 / b0.norm();

  inst.x0 = gen_x0(root, n);
  inst.cons = gen_constraints(root, n, params.m, params.P_scale, params.cond_exponent, inst.x0);
  return inst;
}

Matrix dct_rows(int n, const std::vector<int>& J) {
  Matrix A(static_cast<Eigen::Index>(J.size()), n);
  for (std::size_t r = 0; r < J.size(); ++r) {
    const int k = J[r];
    if (k < 0 || k >= n) throw std::invalid_argument("dct_rows: row index out of range");
    const double a = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
    for (int j = 0; j < n; ++j) A(r, j) = a * std::cos(std::numbers::pi * (2 * j + 1) * k / (2.0 * n));
  }
  return A;
}

StudentTInstance gen_student_t(const StudentTParams& params) {
  check_dims(params.n, params.m, "gen_student_t");
  if (params.n < 80) throw std::invalid_argument("gen_student_t: n must be >= 80");
  const int n = params.n;
  const SplitMix64 root(params.seed);
  StudentTInstance inst;
  inst.n = n;
  inst.N = n / 8;
  inst.phi_weight = params.phi_weight;
  inst.psi_weight = params.psi_weight;
  inst.seed = params.seed;
  inst.cond_exponent = params.cond_exponent;

  SplitMix64 rng = root.split(3);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  inst.x_true = Vector::Zero(n);
  for (int t = 0; t < n / 40; ++t) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    inst.x_true[perm[t]] = sign * std::pow(10.0, 4.0 * rng.uniform());
  }
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  inst.J.assign(perm.begin(), perm.begin() + inst.N);
  std::sort(inst.J.begin(), inst.J.end());

  const Matrix A = dct_rows(n, inst.J);
  inst.b = A * inst.x_true;
  for (int r = 0; r < inst.N; ++r) {
    const double z = rng.normal();
    double chi2 = 0.0;
    for (int q = 0; q < 4; ++q) {
      const double e = rng.normal();
      chi2 += e * e;
    }
    inst.b[r] += 0.1 * z / std::sqrt(chi2 / 4.0);
  }

  inst.x0 = gen_x0(root, n);
  inst.cons = gen_constraints(root, n, params.m, params.P_scale, params.cond_exponent, inst.x0);
  return inst;
}

double student_theta(const Vector& u) { return (1.0 + 4.0 * u.array().square()).log().sum(); }

Vector student_theta_grad(const Vector& u) {
  return (8.0 * u.array() / (1.0 + 4.0 * u.array().square())).matrix();
}

Vector student_theta_hess(const Vector& u) {
  const Eigen::ArrayXd u2 = u.array().square();
  return ((8.0 - 32.0 * u2) / (1.0 + 4.0 * u2).square()).matrix();
}

QCQPObjective::QCQPObjective(Matrix Y0, Vector b0_unit, double omega0)
    : Y0_(std::move(Y0)), lin_(2.0 * omega0 * b0_unit) {}

double QCQPObjective::value(const Vector& x) const { return (Y0_ * x).squaredNorm() + lin_.dot(x); }

Vector QCQPObjective::gradient(const Vector& x) const { return 2.0 * (Y0_.transpose() * (Y0_ * x)) + lin_; }

StudentTLoss::StudentTLoss(Matrix A, Vector b) : A_(std::move(A)), b_(std::move(b)) {}

double StudentTLoss::value(const Vector& x) const { return student_theta(A_ * x - b_); }

Vector StudentTLoss::gradient(const Vector& x) const { return A_.transpose() * student_theta_grad(A_ * x - b_); }

Matrix StudentTCurvature::operator_at(const Vector& x) const {
  const Vector w = student_theta_hess(loss_->A() * x - loss_->b()).cwiseMax(0.0).cwiseSqrt();
  return w.asDiagonal() * loss_->A();
}

namespace {

std::shared_ptr<const ConvexOracle> make_phi(double w) {
  if (w > 0.0) return std::make_shared<L1Oracle>(w);
  return std::make_shared<ZeroConvexOracle>();
}

}  // namespace

ProblemSpec make_problem(const QCQPInstance& inst) {
  ProblemSpec spec;
  spec.n = static_cast<std::size_t>(inst.n);
  spec.m = static_cast<std::size_t>(inst.m);
  spec.f = std::make_shared<QCQPObjective>(inst.Y0, inst.b0_unit, inst.omega0);
  spec.phi = make_phi(inst.phi_weight);
  spec.psi = std::make_shared<L2CorrOracle>(inst.psi_weight);
  spec.g = std::make_shared<FactoredConstraints>(inst.cons);
  spec.curvature = std::make_shared<FixedCurvature>(inst.Y0);
  spec.known_feasible_point = inst.x0;
  return spec;
}

ProblemSpec make_problem(const StudentTInstance& inst) {
  ProblemSpec spec;
  spec.n = static_cast<std::size_t>(inst.n);
  spec.m = static_cast<std::size_t>(inst.m());
  auto loss = std::make_shared<StudentTLoss>(dct_rows(inst.n, inst.J), inst.b);
  spec.f = loss;
  spec.phi = make_phi(inst.phi_weight);
  spec.psi = std::make_shared<L2CorrOracle>(inst.psi_weight);
  spec.g = std::make_shared<FactoredConstraints>(inst.cons);
  spec.curvature = std::make_shared<StudentTCurvature>(loss);
  spec.known_feasible_point = inst.x0;
  return spec;
}

ProblemSpec make_problem(const Instance& inst) {
  return std::visit([](const auto& i) { return make_problem(i); }, inst);
}

const Vector& instance_x0(const Instance& inst) {
  return std::visit([](const auto& i) -> const Vector& { return i.x0; }, inst);
}

std::string instance_kind(const Instance& inst) {
  return std::holds_alternative<QCQPInstance>(inst) ? "qcqp" : "student-t";
}

// ---------------------------------------------------------------------------
// Files

namespace {

json array_json(const double* data, Eigen::Index rows, Eigen::Index cols, bool is_matrix) {
  json j;
  j["shape"] = is_matrix ? json::array({rows, cols}) : json::array({rows});
  j["data"] = encode_f64(std::span<const double>(data, static_cast<std::size_t>(rows * cols)));
  return j;
}

json to_json(const Vector& v) { return array_json(v.data(), v.size(), 1, false); }
json to_json(const Matrix& M) { return array_json(M.data(), M.rows(), M.cols(), true); }

Vector vector_from(const json& j) {
  const auto shape = j.at("shape").get<std::vector<std::int64_t>>();
  if (shape.size() != 1) throw InstanceFormatError("expected a 1-d array");
  const std::vector<double> d = decode_f64(j.at("data").get<std::string>());
  if (static_cast<std::int64_t>(d.size()) != shape[0]) throw InstanceFormatError("array length does not match shape");
  return Eigen::Map<const Vector>(d.data(), shape[0]);
}

Matrix matrix_from(const json& j) {
  const auto shape = j.at("shape").get<std::vector<std::int64_t>>();
  if (shape.size() != 2) throw InstanceFormatError("expected a 2-d array");
  const std::vector<double> d = decode_f64(j.at("data").get<std::string>());
  if (static_cast<std::int64_t>(d.size()) != shape[0] * shape[1]) {
    throw InstanceFormatError("array length does not match shape");
  }
  return Eigen::Map<const Matrix>(d.data(), shape[0], shape[1]);
}

void put_constraints(json& p, const FactoredConstraintSet& c) {
  p["P_scale"] = c.P_scale;
  p["d2"] = to_json(c.d2);
  json B = json::array(), h = json::array();
  for (const Matrix& b : c.B) B.push_back(to_json(b));
  for (const Vector& v : c.h) h.push_back(to_json(v));
  p["B"] = std::move(B);
  p["h"] = std::move(h);
}

FactoredConstraintSet get_constraints(const json& p, int n) {
  FactoredConstraintSet c;
  c.P_scale = p.at("P_scale").get<double>();
  c.d2 = vector_from(p.at("d2"));
  for (const json& b : p.at("B")) c.B.push_back(matrix_from(b));
  for (const json& v : p.at("h")) c.h.push_back(vector_from(v));
  if (c.B.size() != c.h.size() || static_cast<Eigen::Index>(c.B.size()) != c.d2.size()) {
    throw InstanceFormatError("constraint arrays disagree in count");
  }
  for (std::size_t i = 0; i < c.B.size(); ++i) {
    if (c.B[i].rows() != n || c.B[i].cols() != n || c.h[i].size() != n) {
      throw InstanceFormatError("constraint factor has wrong shape");
    }
  }
  return c;
}

json payload_of(const QCQPInstance& i) {
  json p;
  p["n"] = i.n;
  p["m"] = i.m;
  p["seed"] = i.seed;
  p["cond_exponent"] = i.cond_exponent;
  p["omega0"] = i.omega0;
  p["phi_weight"] = i.phi_weight;
  p["psi_weight"] = i.psi_weight;
  p["Y0"] = to_json(i.Y0);
  p["b0_unit"] = to_json(i.b0_unit);
  p["x0"] = to_json(i.x0);
  put_constraints(p, i.cons);
  return p;
}

json payload_of(const StudentTInstance& i) {
  json p;
  p["n"] = i.n;
  p["N"] = i.N;
  p["J"] = i.J;
  p["seed"] = i.seed;
  p["cond_exponent"] = i.cond_exponent;
  p["phi_weight"] = i.phi_weight;
  p["psi_weight"] = i.psi_weight;
  p["b"] = to_json(i.b);
  p["x_true"] = to_json(i.x_true);
  p["x0"] = to_json(i.x0);
  put_constraints(p, i.cons);
  return p;
}

QCQPInstance qcqp_from(const json& p) {
  QCQPInstance i;
  i.n = p.at("n").get<int>();
  i.m = p.at("m").get<int>();
  i.seed = p.at("seed").get<std::uint64_t>();
  i.cond_exponent = p.at("cond_exponent").get<double>();
  i.omega0 = p.at("omega0").get<double>();
  i.phi_weight = p.at("phi_weight").get<double>();
  i.psi_weight = p.at("psi_weight").get<double>();
  i.Y0 = matrix_from(p.at("Y0"));
  i.b0_unit = vector_from(p.at("b0_unit"));
  i.x0 = vector_from(p.at("x0"));
  i.cons = get_constraints(p, i.n);
  if (i.cons.size() != i.m || i.x0.size() != i.n || i.b0_unit.size() != i.n || i.Y0.cols() != i.n) {
    throw InstanceFormatError("qcqp payload dimensions disagree");
  }
  return i;
}

StudentTInstance student_from(const json& p) {
  StudentTInstance i;
  i.n = p.at("n").get<int>();
  i.N = p.at("N").get<int>();
  i.J = p.at("J").get<std::vector<int>>();
  i.seed = p.at("seed").get<std::uint64_t>();
  i.cond_exponent = p.at("cond_exponent").get<double>();
  i.phi_weight = p.at("phi_weight").get<double>();
  i.psi_weight = p.at("psi_weight").get<double>();
  i.b = vector_from(p.at("b"));
  i.x_true = vector_from(p.at("x_true"));
  i.x0 = vector_from(p.at("x0"));
  i.cons = get_constraints(p, i.n);
  if (static_cast<int>(i.J.size()) != i.N || i.b.size() != i.N || i.x0.size() != i.n || i.x_true.size() != i.n) {
    throw InstanceFormatError("student-t payload dimensions disagree");
  }
  return i;
}

std::string checksum_of(const std::string& kind, const json& payload) {
  return hex64(fnv1a64(payload.dump(), fnv1a64(kind)));
}

}  // namespace

std::string instance_checksum(const Instance& inst) {
  const json payload = std::visit([](const auto& i) { return payload_of(i); }, inst);
  return checksum_of(instance_kind(inst), payload);
}

std::string serialize_instance(const Instance& inst) {
  json env;
  env["format"] = "dcinst";
  env["version"] = kInstanceFormatVersion;
  env["kind"] = instance_kind(inst);
  env["payload"] = std::visit([](const auto& i) { return payload_of(i); }, inst);
  env["checksum"] = checksum_of(env["kind"].get<std::string>(), env["payload"]);
  return env.dump(1) + "\n";
}

Instance parse_instance(const std::string& text) {
  json env;
  try {
    env = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ChecksumError(std::string("instance file is truncated or corrupt: ") + e.what());
  }
  if (!env.is_object() || env.value("format", "") != "dcinst") {
    throw InstanceFormatError("not a .dcinst.json document");
  }
  const int version = env.value("version", -1);
  if (version != kInstanceFormatVersion) {
    throw VersionMismatchError("instance format version " + std::to_string(version) + ", expected " +
                               std::to_string(kInstanceFormatVersion));
  }
  const std::string kind = env.value("kind", "");
  if (!env.contains("payload") || !env.contains("checksum")) throw ChecksumError("instance file lacks a checksum");
  const json& payload = env["payload"];
  if (checksum_of(kind, payload) != env["checksum"].get<std::string>()) {
    throw ChecksumError("instance checksum mismatch");
  }
  try {
    if (kind == "qcqp") return qcqp_from(payload);
    if (kind == "student-t") return student_from(payload);
  } catch (const json::exception& e) {
    throw InstanceFormatError(std::string("malformed instance payload: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InstanceFormatError(std::string("malformed instance payload: ") + e.what());
  }
  throw InstanceFormatError("unknown instance kind '" + kind + "'");
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << serialize_instance(inst);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

}  // namespace dcmba

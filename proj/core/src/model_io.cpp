#include "playerkern/model_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "playerkern/errors.hpp"

namespace playerkern {

namespace {

constexpr const char* kMagic = "PLAYERKERN-LAPLACE-MODEL";

std::string hex(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

void write_vector(std::ostream& out, const char* tag, const Eigen::VectorXd& v) {
  out << tag;
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << hex(v(i));
  out << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw DataError("model file truncated");
    return w;
  }
  void expect(const std::string& tag) {
    const auto w = word();
    if (w != tag) throw DataError("model file: expected '" + tag + "', found '" + w + "'");
  }
  double real() {
    const auto w = word();
    char* end = nullptr;
    const double v = std::strtod(w.c_str(), &end);
    if (end != w.c_str() + w.size()) throw DataError("model file: bad number '" + w + "'");
    return v;
  }
  long long integer() {
    const auto w = word();
    char* end = nullptr;
    const long long v = std::strtoll(w.c_str(), &end, 10);
    if (end != w.c_str() + w.size() || w.empty()) throw DataError("model file: bad integer '" + w + "'");
    return v;
  }
  // Rest of the current line is discarded; returns the following full line.
  std::string next_line() {
    std::string line;
    if (!std::getline(in_, line)) throw DataError("model file truncated");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }
  void skip_line() {
    std::string rest;
    std::getline(in_, rest);
  }
  Eigen::VectorXd vector(const std::string& tag, Eigen::Index n) {
    expect(tag);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = real();
    return v;
  }

 private:
  std::istream& in_;
};

}  // namespace

void save_model(std::ostream& out, const TrainedModel& model) {
  const auto& post = model.posterior;
  const auto& h = post.hyper;
  out << kMagic << '\n' << "version " << kModelFormatVersion << '\n';
  out << "sigma2 " << hex(h.kernel.sigma2) << '\n'
      << "sigma2_home " << hex(h.kernel.sigma2_home) << '\n'
      << "jitter " << hex(h.kernel.jitter) << '\n'
      << "log_alpha " << hex(h.draw.log_alpha()) << '\n'
      << "iterations " << post.iterations << '\n';
  out << "players " << model.registry.size() << '\n';
  for (const auto& id : model.registry.ids()) out << id << '\n';

  const auto n = static_cast<Eigen::Index>(post.size());
  out << "matches " << n << '\n';
  for (std::size_t i = 0; i < post.train_vectors.size(); ++i) {
    const auto& x = post.train_vectors[i];
    for (auto p : x.plus) out << p << ' ';
    for (auto p : x.minus) out << p << ' ';
    out << x.home << ' ' << outcome_token(post.train_outcomes[i]) << '\n';
  }
  write_vector(out, "mode", post.mode);
  write_vector(out, "weights", post.weights);
  write_vector(out, "gradient", post.gradient);
  write_vector(out, "sqrt_w", post.sqrt_w);
  out << "chol_b";
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) out << ' ' << hex(post.chol_b(i, j));
    out << '\n';
  }
  out << "end\n";
  if (!out) throw DataError("model write failure");
}

TrainedModel load_model(std::istream& in) {
  Reader rd(in);
  if (rd.word() != kMagic) throw DataError("not a model file (bad magic header)");
  rd.expect("version");
  const auto version = rd.integer();
  if (version != kModelFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version));
  }

  TrainedModel model;
  auto& post = model.posterior;
  rd.expect("sigma2");
  post.hyper.kernel.sigma2 = rd.real();
  rd.expect("sigma2_home");
  post.hyper.kernel.sigma2_home = rd.real();
  rd.expect("jitter");
  post.hyper.kernel.jitter = rd.real();
  rd.expect("log_alpha");
  try {
    post.hyper.draw = DrawParam::from_log_alpha(rd.real());
    post.hyper.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  rd.expect("iterations");
  post.iterations = static_cast<int>(rd.integer());

  rd.expect("players");
  const auto num_players = rd.integer();
  if (num_players < 0) throw DataError("model file: negative player count");
  std::vector<PlayerId> ids;
  ids.reserve(static_cast<std::size_t>(num_players));
  rd.skip_line();
  for (long long i = 0; i < num_players; ++i) ids.push_back(rd.next_line());
  model.registry = PlayerRegistry(std::move(ids));

  rd.expect("matches");
  const auto n = static_cast<Eigen::Index>(rd.integer());
  if (n < 0) throw DataError("model file: negative match count");
  post.train_vectors.resize(static_cast<std::size_t>(n));
  post.train_outcomes.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& x = post.train_vectors[static_cast<std::size_t>(i)];
    for (auto* side : {&x.plus, &x.minus}) {
      for (auto& p : *side) {
        const auto v = rd.integer();
        if (v < 0 || v >= num_players) throw DataError("model file: player index out of range");
        p = static_cast<PlayerIndex>(v);
      }
    }
    x.home = static_cast<int>(rd.integer());
    const auto y = parse_outcome_token(rd.word());
    if (!y) throw DataError("model file: bad outcome token");
    post.train_outcomes[static_cast<std::size_t>(i)] = *y;
  }
  post.mode = rd.vector("mode", n);
  post.weights = rd.vector("weights", n);
  post.gradient = rd.vector("gradient", n);
  post.sqrt_w = rd.vector("sqrt_w", n);
  rd.expect("chol_b");
  post.chol_b = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) post.chol_b(i, j) = rd.real();
  }
  rd.expect("end");
  return model;
}

void save_model_file(const std::string& path, const TrainedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  save_model(out, model);
}

TrainedModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model '" + path + "'");
  return load_model(in);
}

}  // namespace playerkern

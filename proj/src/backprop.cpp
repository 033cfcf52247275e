#include "adjointkit/backprop.hpp"

#include "adjointkit/kernels.hpp"

#include <cmath>

namespace adjointkit::nn {

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "identity") return Activation::identity;
  if (name == "logistic") return Activation::logistic;
  throw InvalidArgument("unknown activation '" + std::string(name) + "'");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::tanh:
      return "tanh";
    case Activation::identity:
      return "identity";
    case Activation::logistic:
      return "logistic";
  }
  return "unknown";
}

double activate(Activation a, double x) {
  switch (a) {
    case Activation::tanh:
      return std::tanh(x);
    case Activation::identity:
      return x;
    case Activation::logistic:
      return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

double activate_derivative(Activation a, double x) {
  switch (a) {
    case Activation::tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::identity:
      return 1.0;
    case Activation::logistic: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s);
    }
  }
  return 1.0;
}

namespace {

Vector apply_activation(Activation a, const Vector& v) {
  return v.unaryExpr([a](double x) { return activate(a, x); });
}

Vector apply_derivative(Activation a, const Vector& v) {
  return v.unaryExpr([a](double x) { return activate_derivative(a, x); });
}

}  // namespace

void NetworkSpec::validate() const {
  if (layer_sizes.size() < 2) throw InvalidArgument("NetworkSpec: need at least one layer");
  for (Index s : layer_sizes)
    if (s < 1) throw InvalidArgument("NetworkSpec: layer sizes must be positive");
}

Parameters Parameters::zeros(const NetworkSpec& spec) {
  spec.validate();
  Parameters p;
  for (Index i = 1; i <= spec.layers(); ++i) {
    const auto rows = spec.layer_sizes[static_cast<std::size_t>(i)];
    const auto cols = spec.layer_sizes[static_cast<std::size_t>(i - 1)];
    p.weights.push_back(Matrix::Zero(rows, cols));
    p.biases.push_back(Vector::Zero(rows));
  }
  return p;
}

Parameters Parameters::random(const NetworkSpec& spec, Lcg& rng) {
  Parameters p = zeros(spec);
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    p.weights[i] = rng.uniform_matrix(p.weights[i].rows(), p.weights[i].cols(), -0.5, 0.5);
    p.biases[i] = rng.uniform_vector(p.biases[i].size(), -0.5, 0.5);
  }
  return p;
}

Index Parameters::size() const {
  Index total = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) total += weights[i].size() + biases[i].size();
  return total;
}

Vector Parameters::flatten() const {
  Vector flat(size());
  Index offset = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    flat.segment(offset, weights[i].size()) = weights[i].reshaped();
    offset += weights[i].size();
    flat.segment(offset, biases[i].size()) = biases[i];
    offset += biases[i].size();
  }
  return flat;
}

Parameters Parameters::unflatten(const NetworkSpec& spec, const Vector& flat) {
  Parameters p = zeros(spec);
  if (flat.size() != p.size())
    throw InvalidArgument("Parameters::unflatten: expected " + std::to_string(p.size()) +
                          " values, got " + std::to_string(flat.size()));
  Index offset = 0;
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    p.weights[i].reshaped() = flat.segment(offset, p.weights[i].size());
    offset += p.weights[i].size();
    p.biases[i] = flat.segment(offset, p.biases[i].size());
    offset += p.biases[i].size();
  }
  return p;
}

Parameters& Parameters::operator+=(const Parameters& other) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] += other.weights[i];
    biases[i] += other.biases[i];
  }
  return *this;
}

ForwardTrace forward(const NetworkSpec& spec, const Parameters& params, const Vector& x) {
  spec.validate();
  if (x.size() != spec.input_size())
    throw InvalidArgument("forward: input has length " + std::to_string(x.size()) +
                          ", network expects " + std::to_string(spec.input_size()));
  if (static_cast<Index>(params.weights.size()) != spec.layers())
    throw InvalidArgument("forward: parameters do not match the network");
  ForwardTrace trace;
  trace.activations.push_back(x);
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    const Matrix& w = params.weights[i];
    if (w.cols() != trace.activations.back().size() || w.rows() != params.biases[i].size() ||
        w.rows() != spec.layer_sizes[i + 1])
      throw InvalidArgument("forward: layer " + std::to_string(i + 1) + " has inconsistent shapes");
    trace.preactivations.push_back(w * trace.activations.back() + params.biases[i]);
    trace.activations.push_back(apply_activation(spec.activation, trace.preactivations.back()));
  }
  return trace;
}

double loss(const ForwardTrace& trace, const Vector& a_obs) {
  if (a_obs.size() != trace.activations.back().size())
    throw InvalidArgument("loss: a_obs has the wrong length");
  return 0.5 * (a_obs - trace.activations.back()).squaredNorm();
}

AdjointTrace adjoint_pass(const NetworkSpec& spec, const Parameters& params,
                          const ForwardTrace& trace, const Vector& a_obs) {
  const auto layers = static_cast<std::size_t>(spec.layers());
  if (trace.activations.size() != layers + 1) throw InvalidArgument("adjoint_pass: bad trace");
  if (a_obs.size() != spec.output_size())
    throw InvalidArgument("adjoint_pass: a_obs has the wrong length");
  AdjointTrace out;
  out.adjoints.resize(layers + 1);
  out.adjoints[layers] = a_obs - trace.activations[layers];
  for (std::size_t i = layers; i-- > 0;) {
    const Vector weighted =
        apply_derivative(spec.activation, trace.preactivations[i]).cwiseProduct(out.adjoints[i + 1]);
    out.adjoints[i] = params.weights[i].transpose() * weighted;
  }
  return out;
}

Parameters gradients(const NetworkSpec& spec, const Parameters& params, const ForwardTrace& trace,
                     const AdjointTrace& adjoints) {
  Parameters g = Parameters::zeros(spec);
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    const Vector local =
        adjoints.adjoints[i + 1].cwiseProduct(apply_derivative(spec.activation, trace.preactivations[i]));
    g.weights[i] = -(local * trace.activations[i].transpose());
    g.biases[i] = -local;
  }
  return g;
}

NetworkProblem::NetworkProblem(NetworkSpec spec, Vector x, Vector a_obs)
    : spec_(std::move(spec)), x_(std::move(x)), a_obs_(std::move(a_obs)) {
  spec_.validate();
  if (x_.size() != spec_.input_size() || a_obs_.size() != spec_.output_size())
    throw InvalidArgument("NetworkProblem: sample does not match the network");
  Index offset = 0;
  for (Index s : spec_.layer_sizes) {
    offsets_.push_back(offset);
    offset += s;
  }
  offsets_.push_back(offset);
}

Index NetworkProblem::state_dim() const { return offsets_.back(); }

Index NetworkProblem::control_dim() const { return Parameters::zeros(spec_).size(); }

std::vector<Vector> NetworkProblem::split_state(const Vector& u) const {
  if (u.size() != state_dim()) throw InvalidArgument("NetworkProblem: state has the wrong length");
  std::vector<Vector> blocks;
  for (std::size_t i = 0; i + 1 < offsets_.size(); ++i)
    blocks.push_back(u.segment(offsets_[i], offsets_[i + 1] - offsets_[i]));
  return blocks;
}

Vector NetworkProblem::residual(const Vector& u, const Vector& z) const {
  const auto a = split_state(u);
  const Parameters p = Parameters::unflatten(spec_, z);
  Vector c(state_dim());
  c.segment(offsets_[0], a[0].size()) = a[0] - x_;
  for (std::size_t i = 1; i < a.size(); ++i) {
    const Vector pre = p.weights[i - 1] * a[i - 1] + p.biases[i - 1];
    c.segment(offsets_[i], a[i].size()) = a[i] - apply_activation(spec_.activation, pre);
  }
  return c;
}

Vector NetworkProblem::solve_forward(const Vector& z) const {
  const ForwardTrace trace = forward(spec_, Parameters::unflatten(spec_, z), x_);
  Vector u(state_dim());
  for (std::size_t i = 0; i < trace.activations.size(); ++i)
    u.segment(offsets_[i], trace.activations[i].size()) = trace.activations[i];
  return u;
}

Vector NetworkProblem::apply_DuC(const Vector& u, const Vector& z, const Vector& du) const {
  const auto a = split_state(u);
  const auto d = split_state(du);
  const Parameters p = Parameters::unflatten(spec_, z);
  Vector out(state_dim());
  out.segment(offsets_[0], d[0].size()) = d[0];
  for (std::size_t i = 1; i < a.size(); ++i) {
    const Vector pre = p.weights[i - 1] * a[i - 1] + p.biases[i - 1];
    out.segment(offsets_[i], d[i].size()) =
        d[i] - apply_derivative(spec_.activation, pre).cwiseProduct(p.weights[i - 1] * d[i - 1]);
  }
  return out;
}

Vector NetworkProblem::apply_DzC(const Vector& u, const Vector& z, const Vector& dz) const {
  const auto a = split_state(u);
  const Parameters p = Parameters::unflatten(spec_, z);
  const Parameters dp = Parameters::unflatten(spec_, dz);
  Vector out = Vector::Zero(state_dim());
  for (std::size_t i = 1; i < a.size(); ++i) {
    const Vector pre = p.weights[i - 1] * a[i - 1] + p.biases[i - 1];
    out.segment(offsets_[i], a[i].size()) =
        -apply_derivative(spec_.activation, pre)
             .cwiseProduct(dp.weights[i - 1] * a[i - 1] + dp.biases[i - 1]);
  }
  return out;
}

Vector NetworkProblem::solve_DuC_adjoint(const Vector& u, const Vector& z,
                                         const Vector& rhs) const {
  // Backward sweep: y^L = r^L, yⁱ = rⁱ + (Wⁱ⁺¹)ᵀ[σ′(·) ∘ yⁱ⁺¹].
  const auto a = split_state(u);
  const auto r = split_state(rhs);
  const Parameters p = Parameters::unflatten(spec_, z);
  std::vector<Vector> y(a.size());
  const std::size_t last = a.size() - 1;
  y[last] = r[last];
  for (std::size_t i = last; i-- > 0;) {
    const Vector pre = p.weights[i] * a[i] + p.biases[i];
    y[i] = r[i] + p.weights[i].transpose() *
                      apply_derivative(spec_.activation, pre).cwiseProduct(y[i + 1]);
  }
  Vector out(state_dim());
  for (std::size_t i = 0; i < y.size(); ++i) out.segment(offsets_[i], y[i].size()) = y[i];
  return out;
}

Vector NetworkProblem::apply_DzC_adjoint(const Vector& u, const Vector& z, const Vector& y) const {
  const auto a = split_state(u);
  const auto yb = split_state(y);
  const Parameters p = Parameters::unflatten(spec_, z);
  Parameters g = Parameters::zeros(spec_);
  for (std::size_t i = 1; i < a.size(); ++i) {
    const Vector pre = p.weights[i - 1] * a[i - 1] + p.biases[i - 1];
    const Vector local = yb[i].cwiseProduct(apply_derivative(spec_.activation, pre));
    g.weights[i - 1] = -(local * a[i - 1].transpose());
    g.biases[i - 1] = -local;
  }
  return g.flatten();
}

double NetworkProblem::objective(const Vector& u, const Vector&) const {
  const Index out = spec_.output_size();
  return 0.5 * (a_obs_ - u.tail(out)).squaredNorm();
}

Vector NetworkProblem::grad_u_f(const Vector& u, const Vector&) const {
  Vector g = Vector::Zero(state_dim());
  const Index out = spec_.output_size();
  g.tail(out) = -(a_obs_ - u.tail(out));
  return g;
}

Vector NetworkProblem::grad_z_f(const Vector&, const Vector&) const {
  return Vector::Zero(control_dim());
}

std::unique_ptr<NetworkProblem> as_constrained_problem(const NetworkSpec& spec, const Vector& x,
                                                       const Vector& a_obs) {
  return std::make_unique<NetworkProblem>(spec, x, a_obs);
}

double batch_loss(const NetworkSpec& spec, const Parameters& params,
                  const std::vector<Sample>& samples) {
  double total = 0.0;
  for (const Sample& s : samples) total += loss(forward(spec, params, s.x), s.a_obs);
  return total;
}

namespace {

template <typename ForEach>
Evaluation batch_evaluate_with(const NetworkSpec& spec, const Parameters& params,
                               const std::vector<Sample>& samples, ForEach&& for_each) {
  std::vector<double> losses(samples.size());
  std::vector<Parameters> grads(samples.size());
  for_each(static_cast<Index>(samples.size()), [&](Index k) {
    const auto i = static_cast<std::size_t>(k);
    const ForwardTrace trace = forward(spec, params, samples[i].x);
    losses[i] = loss(trace, samples[i].a_obs);
    grads[i] = gradients(spec, params, trace, adjoint_pass(spec, params, trace, samples[i].a_obs));
  });
  Parameters total = Parameters::zeros(spec);
  double f = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    f += losses[i];
    total += grads[i];
  }
  return Evaluation{f, total.flatten()};
}

}  // namespace

Evaluation batch_evaluate(const NetworkSpec& spec, const Parameters& params,
                          const std::vector<Sample>& samples) {
  return batch_evaluate_with(spec, params, samples,
                             [](Index n, const std::function<void(Index)>& body) {
                               kernels::omp::for_each_index(n, body);
                             });
}

Evaluation batch_evaluate_serial(const NetworkSpec& spec, const Parameters& params,
                                 const std::vector<Sample>& samples) {
  return batch_evaluate_with(spec, params, samples,
                             [](Index n, const std::function<void(Index)>& body) {
                               kernels::serial::for_each_index(n, body);
                             });
}

TrainResult train(const NetworkSpec& spec, const Parameters& initial,
                  const std::vector<Sample>& samples, double step, int iters, double tol) {
  if (samples.empty()) throw InvalidArgument("train: no samples");
  auto objective = [&](const Vector& z) {
    return batch_loss(spec, Parameters::unflatten(spec, z), samples);
  };
  auto evaluate = [&](const Vector& z) {
    return batch_evaluate(spec, Parameters::unflatten(spec, z), samples);
  };
  DescentOptions options;
  options.step = step;
  options.iters = iters;
  options.tol = tol;
  TrainResult out;
  out.descent = armijo_descent(objective, evaluate, initial.flatten(), options);
  out.params = Parameters::unflatten(spec, out.descent.z);
  return out;
}

}  // namespace adjointkit::nn

#pragma once

#include "adjointkit/adjoint_optim.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace adjointkit::nn {

enum class Activation { tanh, identity, logistic };

Activation parse_activation(std::string_view name);
std::string to_string(Activation a);

double activate(Activation a, double x);
double activate_derivative(Activation a, double x);

/// Layer sizes s₀..s_L (L ≥ 1, every size ≥ 1) and one componentwise activation.
struct NetworkSpec {
  std::vector<Index> layer_sizes;
  Activation activation = Activation::tanh;

  Index layers() const { return static_cast<Index>(layer_sizes.size()) - 1; }
  Index input_size() const { return layer_sizes.front(); }
  Index output_size() const { return layer_sizes.back(); }
  /// Throws InvalidArgument when the invariants fail.
  void validate() const;
};

/// Wⁱ (sᵢ × sᵢ₋₁) and bⁱ (sᵢ), stored 0-based: weights[i-1] is Wⁱ.
struct Parameters {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static Parameters zeros(const NetworkSpec& spec);
  /// Entries uniform in (−0.5, 0.5), drawn layer by layer (W then b).
  static Parameters random(const NetworkSpec& spec, Lcg& rng);

  Index size() const;
  /// [vec(W¹), b¹, …, vec(W^L), b^L] with column-major vec.
  Vector flatten() const;
  static Parameters unflatten(const NetworkSpec& spec, const Vector& flat);

  Parameters& operator+=(const Parameters& other);
};

struct ForwardTrace {
  /// a⁰..a^L; a⁰ is the input.
  std::vector<Vector> activations;
  /// Wⁱaⁱ⁻¹ + bⁱ for i = 1..L (stored at i-1).
  std::vector<Vector> preactivations;
};

struct AdjointTrace {
  /// y⁰..y^L.
  std::vector<Vector> adjoints;
};

/// aⁱ = σ(Wⁱaⁱ⁻¹ + bⁱ).
ForwardTrace forward(const NetworkSpec& spec, const Parameters& params, const Vector& x);

/// ½‖a_obs − a^L‖².
double loss(const ForwardTrace& trace, const Vector& a_obs);

/// y^L = a_obs − a^L,  yⁱ = (Wⁱ⁺¹)ᵀ[σ′(Wⁱ⁺¹aⁱ + bⁱ⁺¹) ∘ yⁱ⁺¹].
AdjointTrace adjoint_pass(const NetworkSpec& spec, const Parameters& params,
                          const ForwardTrace& trace, const Vector& a_obs);

/// ∂f/∂Wⁱ = −[yⁱ ∘ σ′(·)](aⁱ⁻¹)ᵀ,  ∂f/∂bⁱ = −yⁱ ∘ σ′(·).
Parameters gradients(const NetworkSpec& spec, const Parameters& params, const ForwardTrace& trace,
                     const AdjointTrace& adjoints);

/// The training problem for one sample in reduced-space form: state
/// u = [a⁰; …; a^L], control z = Parameters::flatten(), constraint blocks
/// c⁰ = a⁰ − x and cⁱ = aⁱ − σ(Wⁱaⁱ⁻¹ + bⁱ). D_u c is block lower bidiagonal
/// with identity diagonal blocks, so the adjoint solve is one backward sweep.
class NetworkProblem : public ConstrainedProblem {
 public:
  NetworkProblem(NetworkSpec spec, Vector x, Vector a_obs);

  Index state_dim() const override;
  Index control_dim() const override;
  Vector residual(const Vector& u, const Vector& z) const override;
  Vector solve_forward(const Vector& z) const override;
  Vector apply_DuC(const Vector& u, const Vector& z, const Vector& du) const override;
  Vector apply_DzC(const Vector& u, const Vector& z, const Vector& dz) const override;
  Vector solve_DuC_adjoint(const Vector& u, const Vector& z, const Vector& rhs) const override;
  Vector apply_DzC_adjoint(const Vector& u, const Vector& z, const Vector& y) const override;
  double objective(const Vector& u, const Vector& z) const override;
  Vector grad_u_f(const Vector& u, const Vector& z) const override;
  Vector grad_z_f(const Vector& u, const Vector& z) const override;

  const NetworkSpec& spec() const { return spec_; }
  /// Offset of aⁱ inside the state vector.
  Index state_offset(Index layer) const { return offsets_[static_cast<std::size_t>(layer)]; }

 private:
  std::vector<Vector> split_state(const Vector& u) const;

  NetworkSpec spec_;
  Vector x_;
  Vector a_obs_;
  std::vector<Index> offsets_;
};

std::unique_ptr<NetworkProblem> as_constrained_problem(const NetworkSpec& spec, const Vector& x,
                                                       const Vector& a_obs);

struct Sample {
  Vector x;
  Vector a_obs;
};

/// Summed loss over samples.
double batch_loss(const NetworkSpec& spec, const Parameters& params,
                  const std::vector<Sample>& samples);

/// Summed loss and gradient. Samples are processed concurrently and the
/// per-sample gradients are added in sample order.
Evaluation batch_evaluate(const NetworkSpec& spec, const Parameters& params,
                          const std::vector<Sample>& samples);
/// Serial reference for batch_evaluate.
Evaluation batch_evaluate_serial(const NetworkSpec& spec, const Parameters& params,
                                 const std::vector<Sample>& samples);

struct TrainResult {
  Parameters params;
  DescentResult descent;
};

/// Armijo gradient descent on the summed loss.
TrainResult train(const NetworkSpec& spec, const Parameters& initial,
                  const std::vector<Sample>& samples, double step, int iters, double tol);

}  // namespace adjointkit::nn

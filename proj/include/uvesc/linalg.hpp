#pragma once

// Small dense linear algebra for n <= ~8. Row-major storage, value semantics.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace uvesc {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Matrix transposed() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

// Vector helpers. Kept as named functions so they never collide with std:: overloads.
Vector add(std::span<const double> a, std::span<const double> b);
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector scaled(std::span<const double> a, double s);
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double max_abs(std::span<const double> a);

double frobenius_norm(const Matrix& m);
double max_abs(const Matrix& m);
/// Induced 2-norm, sqrt(lambda_max(m^T m)).
double spectral_norm(const Matrix& m);

bool is_symmetric(const Matrix& m, double rel_tol = 1e-9);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
Vector symmetric_eigenvalues(const Matrix& m);

/// (lambda_min, lambda_max) of a symmetric matrix. Throws ValidationError if not symmetric.
std::pair<double, double> symmetric_eigen_bounds(const Matrix& m);

inline constexpr double kDefaultDeterminantFloor = 1e-12;

double determinant(const Matrix& m);

/// Gauss-Jordan inverse with partial pivoting. Throws SingularMatrixError when |det| <= floor.
Matrix invert_small(const Matrix& m, double det_floor = kDefaultDeterminantFloor);

/// Solves a x = b by Gaussian elimination with partial pivoting and one refinement pass.
Vector solve_linear(const Matrix& a, std::span<const double> b);

}  // namespace uvesc

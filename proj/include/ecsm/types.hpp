#pragma once

#include <array>
#include <compare>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ecsm {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

// Largest supported number of modes in one Fock ket, environment ancillas included.
inline constexpr std::size_t kMaxModes = 8;

//------------------------------------------------------------------------------
// Errors
//------------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ECSM_DEFINE_ERROR(Name)         \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

ECSM_DEFINE_ERROR(CutoffTooSmall);
ECSM_DEFINE_ERROR(DimensionMismatch);
ECSM_DEFINE_ERROR(BasisTooLarge);
ECSM_DEFINE_ERROR(ModeOutOfRange);
ECSM_DEFINE_ERROR(UnsupportedSector);
ECSM_DEFINE_ERROR(InvalidParameter);
ECSM_DEFINE_ERROR(EmptyDistribution);
ECSM_DEFINE_ERROR(GridMismatch);
ECSM_DEFINE_ERROR(BudgetTooSmall);
ECSM_DEFINE_ERROR(EstimationFailure);
ECSM_DEFINE_ERROR(NormDrift);
ECSM_DEFINE_ERROR(BasisMismatch);
ECSM_DEFINE_ERROR(NonHermitian);
ECSM_DEFINE_ERROR(ZeroInformation);
ECSM_DEFINE_ERROR(ConfigError);
ECSM_DEFINE_ERROR(UnknownFigure);
ECSM_DEFINE_ERROR(IoError);

#undef ECSM_DEFINE_ERROR

//------------------------------------------------------------------------------
// FockIndex
//------------------------------------------------------------------------------

// Photon occupation numbers, one per mode. Fixed capacity so it can key maps
// without heap traffic.
class FockIndex {
 public:
  FockIndex() = default;

  explicit FockIndex(std::size_t modes) : size_(check_size(modes)) {}

  FockIndex(std::initializer_list<int> occupations)
      : size_(check_size(occupations.size())) {
    std::size_t i = 0;
    for (int n : occupations) set(i++, n);
  }

  std::size_t size() const { return size_; }

  int operator[](std::size_t mode) const { return n_[mode]; }

  void set(std::size_t mode, int n) {
    if (mode >= size_) throw ModeOutOfRange("FockIndex: mode out of range");
    if (n < 0 || n > 0xFFFF) throw InvalidParameter("FockIndex: occupation out of range");
    n_[mode] = static_cast<std::uint16_t>(n);
  }

  FockIndex with(std::size_t mode, int n) const {
    FockIndex out = *this;
    out.set(mode, n);
    return out;
  }

  // Removes one mode, shifting later modes down.
  FockIndex without(std::size_t mode) const {
    if (mode >= size_) throw ModeOutOfRange("FockIndex: mode out of range");
    FockIndex out;
    out.size_ = static_cast<std::uint8_t>(size_ - 1);
    for (std::size_t i = 0, k = 0; i < size_; ++i)
      if (i != mode) out.n_[k++] = n_[i];
    return out;
  }

  FockIndex appended(int n) const {
    FockIndex out = *this;
    out.size_ = check_size(size_ + 1u);
    out.set(size_, n);
    return out;
  }

  int total() const {
    int t = 0;
    for (std::size_t i = 0; i < size_; ++i) t += n_[i];
    return t;
  }

  std::string to_string() const {
    std::string s = "|";
    for (std::size_t i = 0; i < size_; ++i) {
      if (i) s += ",";
      s += std::to_string(n_[i]);
    }
    return s + ">";
  }

  auto operator<=>(const FockIndex&) const = default;

 private:
  static std::uint8_t check_size(std::size_t modes) {
    if (modes > kMaxModes) throw DimensionMismatch("FockIndex: too many modes");
    return static_cast<std::uint8_t>(modes);
  }

  std::uint8_t size_ = 0;
  std::array<std::uint16_t, kMaxModes> n_{};
};

}  // namespace ecsm

#ifndef PRELAST_COMMON_HPP
#define PRELAST_COMMON_HPP

#include <array>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace prelast {

using Index = std::int64_t;
using Vec3 = std::array<double, 3>;

/// Thrown on violated preconditions and invalid user input.
class InvalidArgument : public std::runtime_error {
public:
  explicit InvalidArgument(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown when a linear system is diagnosed as structurally or numerically singular.
class SingularSystemError : public std::runtime_error {
public:
  explicit SingularSystemError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {
[[noreturn]] inline void fail(const char* cond, const char* file, int line,
                              const std::string& msg) {
  std::ostringstream os;
  os << file << ":" << line << ": check `" << cond << "` failed";
  if (!msg.empty()) os << ": " << msg;
  throw InvalidArgument(os.str());
}
}  // namespace detail

#define PRELAST_CHECK(cond, msg)                                      \
  do {                                                                \
    if (!(cond)) ::prelast::detail::fail(#cond, __FILE__, __LINE__, (msg)); \
  } while (0)

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace prelast

#endif

#ifndef JETCARTAN_COORDINATE_HPP
#define JETCARTAN_COORDINATE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace jc {

// What a coordinate symbol refers to on the (extended) bundle chart.
// Jet covers every derivative level: |dirs| == 1 is a first-jet slot
// (admitted z^i_mu or, if the pair is outside P, the prolongation-level
// y^i_{;mu}); |dirs| == 2 the second jets z^i_{mu sigma}; higher orders
// appear only through repeated total derivatives.
enum class Role : std::uint8_t {
  Base,            // x^mu
  Fiber,           // y^i
  Jet,             // z^i_dirs, dirs sorted
  MomentumScalar,  // p        (Lambda^{n+1}_2 chart)
  Momentum,        // p^mu_i
  Source,          // p_i      (Lambda^{n+2}_2 chart)
  Dual,            // lambda^i (RET dual variables)
};

struct Coordinate {
  Role role = Role::Base;
  std::int16_t field = -1;        // fiber index i (Fiber/Jet/Momentum/Source/Dual)
  std::int16_t base = -1;         // base index mu (Base/Momentum)
  std::vector<std::int16_t> dirs; // Jet only: sorted derivative directions
  std::string name;               // display form; not part of identity

  static Coordinate base_coord(int mu, std::string n) {
    Coordinate c; c.role = Role::Base; c.base = (std::int16_t)mu; c.name = std::move(n); return c;
  }
  static Coordinate fiber(int i, std::string n) {
    Coordinate c; c.role = Role::Fiber; c.field = (std::int16_t)i; c.name = std::move(n); return c;
  }
  static Coordinate jet(int i, std::vector<std::int16_t> dirs, std::string n);
  static Coordinate momentum_scalar() {
    Coordinate c; c.role = Role::MomentumScalar; c.name = "p"; return c;
  }
  static Coordinate momentum(int mu, int i, std::string n) {
    Coordinate c; c.role = Role::Momentum; c.base = (std::int16_t)mu;
    c.field = (std::int16_t)i; c.name = std::move(n); return c;
  }
  static Coordinate source(int i, std::string n) {
    Coordinate c; c.role = Role::Source; c.field = (std::int16_t)i; c.name = std::move(n); return c;
  }
  static Coordinate dual(int i, std::string n) {
    Coordinate c; c.role = Role::Dual; c.field = (std::int16_t)i; c.name = std::move(n); return c;
  }

  int order() const { return role == Role::Jet ? (int)dirs.size() : 0; }
};

// Fixed total order: base < fiber < jets (by order, then field, then dirs)
// < p < p^mu_i < p_i < dual. Name does not participate.
int compare(const Coordinate& a, const Coordinate& b);

inline bool operator==(const Coordinate& a, const Coordinate& b) { return compare(a, b) == 0; }
inline bool operator!=(const Coordinate& a, const Coordinate& b) { return compare(a, b) != 0; }
inline bool operator<(const Coordinate& a, const Coordinate& b) { return compare(a, b) < 0; }

}  // namespace jc

#endif

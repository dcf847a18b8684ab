#pragma once

#include "seqbirds/catalog.hpp"
#include "seqbirds/codec.hpp"

#include <utility>
#include <vector>

namespace seqbirds {

inline constexpr double kContactTol = 0.02;

enum class Instability { unsupported, com_outside_support, interpenetration };

struct Offence {
  int index = 0;  // position in Level::objects
  Instability reason = Instability::unsupported;

  friend bool operator==(const Offence&, const Offence&) = default;
};

struct StabilityReport {
  bool stable = true;
  std::vector<Offence> offenders;  // ascending index, one per object
};

struct PhysicsParams {
  double ground_y = -3.5;
  double contact_tol = kContactTol;
  double overlap_tol = kOverlapTol;
};

/// Quasi-static verdict. A non-platform object must rest on the ground or
/// on the top of at least one horizontally overlapping object, with its
/// center of mass inside the hull of its contact intervals. Rolling objects
/// additionally need two supports straddling their center. Boxes
/// interpenetrating by more than overlap_tol are offences.
StabilityReport check_stability(const ObjectCatalog& catalog, const Level& level, const PhysicsParams& params = {});

/// Drops (type_id, column) pairs in order using the decoder's placement.
Level settle(const ObjectCatalog& catalog, const std::vector<std::pair<int, int>>& drops, const GridSpec& spec = {});

}  // namespace seqbirds

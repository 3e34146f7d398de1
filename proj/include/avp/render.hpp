#pragma once

#include "avp/trace.hpp"

#include <string>

namespace avp
{

inline constexpr const char * kVacantColor = "#2ca02c";
inline constexpr const char * kOccupiedColor = "#d62728";

/// Spot fill for a belief: vacant colour at 0, occupied colour at 1, linear in between.
std::string belief_color(double b);

/// One SVG frame: lot, belief-coloured spots, sensor rays, agents, predictions and the ego plan
/// being followed. Throws std::out_of_range for a frame past the end of the trace.
std::string render_frame_svg(const TraceData & trace, int frame);

}  // namespace avp

#pragma once

#include "avp/geometry.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>

namespace avp
{

/// Defaults applied when a lot file omits a spot or road size.
struct LotDefaults
{
  double spot_length{5.5};
  double spot_width{2.7};
  double road_width{6.5};
};

/*
 * Lot file schema (JSON):
 *
 *   {
 *     "boundary": {"min": [x, y], "max": [x, y]},
 *     "entrance": [x, y],
 *     "defaults": {"spot_length": 5.5, "spot_width": 2.7, "road_width": 6.5},   (optional)
 *     "spots":    [{"center": [x, y], "heading": rad, "length": m, "width": m}, ...],
 *     "roads":    [{"start": [x, y], "end": [x, y], "width": m}, ...]
 *   }
 *
 * Spot length/width and road width fall back to "defaults" when absent.
 */
ParkingLot lot_from_json(const nlohmann::json & j);
nlohmann::json lot_to_json(const ParkingLot & lot);

ParkingLot load_lot(const std::string & path);
void save_lot(const ParkingLot & lot, const std::string & path);

}  // namespace avp

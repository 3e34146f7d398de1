#include "avp/lot_io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <stdexcept>

namespace avp
{

namespace
{

Vec2 read_point(const nlohmann::json & j, const char * field)
{
  if (!j.contains(field) || !j.at(field).is_array() || j.at(field).size() != 2) {
    throw std::invalid_argument(std::string("lot file: field '") + field + "' must be [x, y]");
  }
  return {j.at(field)[0].get<double>(), j.at(field)[1].get<double>()};
}

nlohmann::json write_point(const Vec2 & p) { return nlohmann::json::array({p.x(), p.y()}); }

}  // namespace

ParkingLot lot_from_json(const nlohmann::json & j)
{
  LotDefaults defaults;
  if (j.contains("defaults")) {
    const auto & d = j.at("defaults");
    defaults.spot_length = d.value("spot_length", defaults.spot_length);
    defaults.spot_width = d.value("spot_width", defaults.spot_width);
    defaults.road_width = d.value("road_width", defaults.road_width);
  }

  ParkingLot lot;
  if (!j.contains("boundary")) {
    throw std::invalid_argument("lot file: missing 'boundary'");
  }
  lot.boundary.min = read_point(j.at("boundary"), "min");
  lot.boundary.max = read_point(j.at("boundary"), "max");
  lot.entrance = read_point(j, "entrance");

  for (const auto & s : j.value("spots", nlohmann::json::array())) {
    OrientedRect spot;
    spot.center = read_point(s, "center");
    spot.heading = normalize_angle(s.value("heading", 0.0));
    spot.length = s.value("length", defaults.spot_length);
    spot.width = s.value("width", defaults.spot_width);
    lot.spots.push_back(spot);
  }
  for (const auto & r : j.value("roads", nlohmann::json::array())) {
    Road road;
    road.start = read_point(r, "start");
    road.end = read_point(r, "end");
    road.width = r.value("width", defaults.road_width);
    if ((road.end - road.start).norm() <= kGeomEps) {
      throw std::invalid_argument("lot file: road with coincident start and end");
    }
    lot.roads.push_back(road);
  }
  lot.validate();
  return lot;
}

nlohmann::json lot_to_json(const ParkingLot & lot)
{
  nlohmann::json j;
  j["boundary"] = {{"min", write_point(lot.boundary.min)}, {"max", write_point(lot.boundary.max)}};
  j["entrance"] = write_point(lot.entrance);
  auto spots = nlohmann::json::array();
  for (const auto & s : lot.spots) {
    spots.push_back(
      {{"center", write_point(s.center)}, {"heading", s.heading}, {"length", s.length}, {"width", s.width}});
  }
  j["spots"] = std::move(spots);
  auto roads = nlohmann::json::array();
  for (const auto & r : lot.roads) {
    roads.push_back({{"start", write_point(r.start)}, {"end", write_point(r.end)}, {"width", r.width}});
  }
  j["roads"] = std::move(roads);
  return j;
}

ParkingLot load_lot(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open lot file: " + path);
  }
  return lot_from_json(nlohmann::json::parse(in));
}

void save_lot(const ParkingLot & lot, const std::string & path)
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write lot file: " + path);
  }
  out << lot_to_json(lot).dump(2) << '\n';
}

}  // namespace avp

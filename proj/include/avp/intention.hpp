#pragma once

#include "avp/belief.hpp"
#include "avp/geometry.hpp"
#include "avp/sensing.hpp"

#include <Eigen/Core>

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace avp
{

struct IntentionParams
{
  double beta{0.5};
  double l_def{4.97};
  double w_def{1.86};
  double t_hist{4.0};
  double dt{0.1};
  double window{40.0};
  double resolution{0.1};
};

/// H x W x 3 raster around one vehicle. Row 0 is the far end ahead of the vehicle, column 0 its
/// left side. Channel 0: roads (1.0) and spot markings (0.5); channel 1: obstacles; channel 2:
/// the marked candidate spot.
struct BevRaster
{
  Pose2 frame;
  double resolution{0.1};
  std::array<Eigen::MatrixXf, 3> channels;

  int rows() const { return static_cast<int>(channels[0].rows()); }
  int cols() const { return static_cast<int>(channels[0].cols()); }
  /// Cell containing a world point, or nullopt when outside.
  std::optional<std::pair<int, int>> cell_of(const Vec2 & p) const;
  Vec2 cell_center(int row, int col) const;
  /// Interleaved (row, col, channel) bytes, value * 255 rounded.
  std::vector<unsigned char> to_bytes() const;
};

/// Everything the ego knows when reconstructing another vehicle's surroundings.
struct BevContext
{
  const ParkingLot * lot{nullptr};
  const BeliefMap * beliefs{nullptr};
  const Observation * obs{nullptr};
  /// Ego poses over the past t_hist, oldest first.
  std::vector<Pose2> ego_history;
  double ego_length{4.97};
  double ego_width{1.86};
};

OrientedRect bev_window(const Pose2 & vehicle, double window);

BevRaster reconstruct_bev(
  const BevContext & ctx, int target_vehicle, std::optional<int> marked_spot, const IntentionParams & params);

/// Spots whose centers lie in the vehicle's window with belief strictly below beta.
std::vector<int> candidate_spots_for(
  const Pose2 & vehicle, const ParkingLot & lot, const BeliefMap & beliefs, const IntentionParams & params);

struct IntentionFeatures
{
  double d{0.0};
  double a{1.0};
  double v_bar{0.0};
  double d_ent{0.0};
  double t_lot{0.0};
};

IntentionFeatures compute_features(
  const ObservedVehicle & vehicle, const Vec2 & spot_center, const ParkingLot & lot, double dt, double first_seen,
  double clock);

/// Road center lines crossing the window boundary, each in both travel directions, restricted to
/// lines connected to the vehicle's road inside the window.
std::vector<Pose2> exploration_candidates_for(const Pose2 & vehicle, const ParkingLot & lot, double window);

/// 0.5 * (cos of angle between heading and direction to q + cos of heading difference).
double forward_cosine(const Pose2 & vehicle, const Pose2 & q);

struct IntentionDistribution
{
  /// (spot index, probability), ascending spot index.
  std::vector<std::pair<int, double>> spot_probs;
  std::vector<Pose2> exploration_points;
  std::vector<double> exploration_probs;

  double total() const;
  SpotIntents spot_map() const;
};

struct ScoringRequest
{
  int vehicle{-1};
  Pose2 pose;
  double v_bar{0.0};
  double d_ent{0.0};
  double t_lot{0.0};
  std::vector<int> spots;
  std::vector<IntentionFeatures> spot_features;
  std::vector<Pose2> exploration_points;
  /// Filled only when the scorer asks for rasters: index 0 unmarked, then one per spot.
  std::vector<BevRaster> rasters;
};

class IntentionScorer
{
public:
  virtual ~IntentionScorer() = default;
  virtual bool needs_rasters() const = 0;
  /// Returns one probability per spot then one per exploration point, summing to 1.
  virtual IntentionDistribution score(const ScoringRequest & request) = 0;
};

struct HeuristicWeights
{
  double w_d{2.0};
  double w_a{1.5};
  double w_v{0.5};
  double w_e{1.0};
  double d_max{20.0};
  double v0{2.0};
  double v_max{5.0};
};

/// Softmax over hand-set logits of the intention features.
class HeuristicScorer : public IntentionScorer
{
public:
  explicit HeuristicScorer(HeuristicWeights weights = {}) : w_(weights) {}
  bool needs_rasters() const override { return false; }
  IntentionDistribution score(const ScoringRequest & request) override;

  double spot_logit(const IntentionFeatures & f) const;
  double exploration_logit(double forward_cos, double v_bar) const;

private:
  HeuristicWeights w_;
};

/// Runs `/bin/sh -c command` and exchanges one JSON line per request over its stdin/stdout.
/// Falls back to the heuristic scorer when the child misbehaves or exceeds the timeout.
class ExternalScorer : public IntentionScorer
{
public:
  ExternalScorer(std::string command, double timeout_s = 1.0, HeuristicWeights fallback = {});
  ~ExternalScorer() override;
  ExternalScorer(const ExternalScorer &) = delete;
  ExternalScorer & operator=(const ExternalScorer &) = delete;

  bool needs_rasters() const override { return true; }
  IntentionDistribution score(const ScoringRequest & request) override;
  int fallbacks() const { return fallbacks_; }

private:
  bool ensure_child();
  void stop_child();
  std::optional<std::string> exchange(const std::string & line);

  std::string command_;
  double timeout_s_;
  HeuristicScorer fallback_;
  int pid_{-1};
  int to_child_{-1};
  int from_child_{-1};
  std::string buffer_;
  int fallbacks_{0};
};

std::string base64_encode(const unsigned char * data, std::size_t size);

/// Serialized request line for the external scorer protocol (no trailing newline).
std::string scoring_request_json(const ScoringRequest & request);

/// Parses a response line; throws std::runtime_error on malformed input.
IntentionDistribution parse_scoring_response(const std::string & line, const ScoringRequest & request);

struct VehicleIntent
{
  int vehicle{-1};
  double v_bar{0.0};
  IntentionDistribution dist;
};

/// Scores every observed dynamic vehicle that has at least one candidate.
std::vector<VehicleIntent> estimate_intentions(
  const BevContext & ctx, const std::map<int, double> & first_seen, double clock, IntentionScorer & scorer,
  const IntentionParams & params);

}  // namespace avp

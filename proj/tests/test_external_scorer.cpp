#include "avp/intention.hpp"

#include <gtest/gtest.h>

#include <string>

using namespace avp;

namespace
{

ScoringRequest two_spot_request()
{
  ScoringRequest r;
  r.vehicle = 2;
  r.pose = {1, 2, 0};
  r.spots = {5, 3};
  r.spot_features = {{4.0, 0.5, 1.0, 3.0, 1.0}, {8.0, -0.5, 1.0, 3.0, 1.0}};
  r.exploration_points = {{10, 2, 0}};
  return r;
}

}  // namespace

TEST(Base64, RfcVectors)
{
  auto enc = [](const std::string & s) {
    return base64_encode(reinterpret_cast<const unsigned char *>(s.data()), s.size());
  };
  EXPECT_EQ(enc(""), "");
  EXPECT_EQ(enc("f"), "Zg==");
  EXPECT_EQ(enc("fo"), "Zm8=");
  EXPECT_EQ(enc("foo"), "Zm9v");
  EXPECT_EQ(enc("foob"), "Zm9vYg==");
  EXPECT_EQ(enc("fooba"), "Zm9vYmE=");
  EXPECT_EQ(enc("foobar"), "Zm9vYmFy");
}

TEST(ScorerProtocol, ResponseIsNormalizedAndValidated)
{
  const auto req = two_spot_request();
  const auto d = parse_scoring_response(R"({"spot_probs":[2,1],"exploration_probs":[1]})", req);
  ASSERT_EQ(d.spot_probs.size(), 2u);
  // Sorted by spot index: spot 3 carried weight 1, spot 5 weight 2.
  EXPECT_EQ(d.spot_probs[0].first, 3);
  EXPECT_DOUBLE_EQ(d.spot_probs[0].second, 0.25);
  EXPECT_DOUBLE_EQ(d.spot_probs[1].second, 0.5);
  EXPECT_DOUBLE_EQ(d.exploration_probs[0], 0.25);
  EXPECT_THROW(parse_scoring_response(R"({"spot_probs":[1],"exploration_probs":[1]})", req), std::runtime_error);
  EXPECT_THROW(parse_scoring_response(R"({"spot_probs":[1,-1],"exploration_probs":[1]})", req), std::runtime_error);
  EXPECT_THROW(parse_scoring_response("nope", req), std::runtime_error);

  const auto line = scoring_request_json(req);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_NE(line.find("\"vehicle\":2"), std::string::npos);
}

TEST(ExternalScorer, TalksToChildProcess)
{
  // Puts all weight on the first listed spot.
  const std::string cmd =
    "python3 -u -c \"import sys, json\n"
    "for line in sys.stdin:\n"
    "    r = json.loads(line)\n"
    "    n = len(r['spots']); m = len(r['exploration'])\n"
    "    print(json.dumps({'spot_probs': [1.0] + [0.0] * (n - 1), 'exploration_probs': [0.0] * m}), flush=True)\n\"";
  ExternalScorer scorer(cmd, 5.0);
  auto req = two_spot_request();
  for (int k = 0; k < 2; ++k) {
    const auto d = scorer.score(req);
    EXPECT_EQ(scorer.fallbacks(), 0);
    ASSERT_EQ(d.spot_probs.size(), 2u);
    EXPECT_EQ(d.spot_probs[1].first, 5);
    EXPECT_DOUBLE_EQ(d.spot_probs[1].second, 1.0);
  }
}

TEST(ExternalScorer, TimeoutFallsBackToHeuristic)
{
  ExternalScorer scorer("sleep 5", 0.2);
  const auto req = two_spot_request();
  const auto d = scorer.score(req);
  EXPECT_EQ(scorer.fallbacks(), 1);
  const auto h = HeuristicScorer().score(req);
  ASSERT_EQ(d.spot_probs.size(), h.spot_probs.size());
  for (std::size_t i = 0; i < d.spot_probs.size(); ++i) {
    EXPECT_DOUBLE_EQ(d.spot_probs[i].second, h.spot_probs[i].second);
  }
}

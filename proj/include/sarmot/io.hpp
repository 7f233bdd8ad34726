#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sarmot/core.hpp"
#include "sarmot/grid.hpp"
#include "sarmot/lfa.hpp"
#include "sarmot/lineops.hpp"
#include "sarmot/tracker.hpp"

namespace sarmot {

/// DataError carrying the file and 1-based line that failed to parse.
class ParseError : public DataError {
 public:
  ParseError(const std::string& source, int line, const std::string& what);
  const std::string& source() const { return source_; }
  int line() const { return line_; }

 private:
  std::string source_;
  int line_;
};

/// One MOTChallenge line. The optional 10th column carries motion awareness.
struct MotRecord {
  int frame = 1;
  int id = -1;
  double x = 0.0, y = 0.0, w = 1.0, h = 1.0;
  double conf = 1.0;
  int class_id = -1;
  double visibility = -1.0;
  std::optional<double> motion_awareness;

  friend bool operator==(const MotRecord&, const MotRecord&) = default;
};

/// Shortest decimal text that parses back to the same double.
std::string format_real(double v);

std::vector<MotRecord> parse_mot_records(std::istream& in, const std::string& source = "<stream>");
std::vector<MotRecord> read_mot_records(const std::filesystem::path& path);
std::string format_mot_record(const MotRecord& r);
void write_mot_records(const std::filesystem::path& path, const std::vector<MotRecord>& records);

/// Groups by frame (ascending), keeping file order inside a frame.
std::map<int, FrameDetections> records_to_detections(const std::vector<MotRecord>& records);
TrajectorySet records_to_trajectories(const std::vector<MotRecord>& records);

std::map<int, FrameDetections> read_detections(const std::filesystem::path& path);
TrajectorySet read_trajectories(const std::filesystem::path& path);

/// Records ordered by frame then track id; conf 1, visibility -1.
std::vector<MotRecord> trajectories_to_records(const TrajectorySet& t);
void write_mot_file(const TrajectorySet& t, const std::filesystem::path& path);

/// (frame, detection index within that frame) -> unit vector.
using EmbeddingTable = std::map<std::pair<int, int>, std::vector<double>>;

EmbeddingTable parse_embeddings(std::istream& in, const std::string& source = "<stream>");
EmbeddingTable read_embeddings(const std::filesystem::path& path);
void write_embeddings(const std::filesystem::path& path, const EmbeddingTable& table);
/// Entries without a matching detection are an error; detections without an
/// entry keep no embedding.
void attach_embeddings(std::map<int, FrameDetections>& dets, const EmbeddingTable& table);

/// `frame r11 r12 tx r21 r22 ty` per line.
CmcSequence parse_cmc(std::istream& in, const std::string& source = "<stream>");
CmcSequence read_cmc(const std::filesystem::path& path);
void write_cmc(const std::filesystem::path& path, const CmcSequence& cmc);

/// Flat `key = value` lines; '#' starts a comment. Keeps the line of each key.
struct KeyValueFile {
  std::string source;
  std::map<std::string, std::pair<std::string, int>> entries;
};
KeyValueFile parse_key_values(std::istream& in, const std::string& source = "<stream>");
KeyValueFile read_key_values(const std::filesystem::path& path);

double kv_real(const KeyValueFile& kv, const std::string& key);
long long kv_integer(const KeyValueFile& kv, const std::string& key);

/// Overrides defaults with the file's values; unknown keys are errors.
TrackerConfig tracker_config_from(const KeyValueFile& kv);
std::string format_tracker_config(const TrackerConfig& cfg);

/// Raw tensor: "VSFM", u32 H, W, C (little endian), then C*H*W float64 LE.
void write_tensor(const std::filesystem::path& path, const ChannelGrid& g);
FeatureMap read_tensor(const std::filesystem::path& path);
bool has_tensor_magic(const std::filesystem::path& path);

/// Weights as a (2C x 2C x 1) tensor file.
FusionParams read_fusion_params(const std::filesystem::path& path);

/// Header `in hidden out`, then W1 (hidden rows), b1, W2 (out rows), b2.
Mlp read_mlp(const std::filesystem::path& path);

/// One proposal per line: x y w h v_hat f1 ... fd.
std::vector<Proposal> read_proposals(const std::filesystem::path& path);
void write_proposals(const std::filesystem::path& path, const std::vector<Proposal>& ps);

}  // namespace sarmot

#include "sarmot/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sarmot {

static_assert(std::endian::native == std::endian::little,
              "tensor I/O assumes a little-endian host");

ParseError::ParseError(const std::string& source, int line, const std::string& what)
    : DataError(source + ":" + std::to_string(line) + ": " + what), source_(source), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::optional<double> to_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::optional<long long> to_integer(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && p == s.data() + s.size() && !s.empty()) return v;
  // MOT files in the wild write integer columns as "1.0" or "-1.000000".
  const auto r = to_real(s);
  if (r && std::floor(*r) == *r && std::abs(*r) < 9e15) return static_cast<long long>(*r);
  return std::nullopt;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t b = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > b) out.push_back(line.substr(b, i - b));
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace

std::string format_real(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::vector<MotRecord> parse_mot_records(std::istream& in, const std::string& source) {
  std::vector<MotRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    const auto f = split(text, ',');
    if (f.size() != 9 && f.size() != 10) {
      throw ParseError(source, lineno, "expected 9 or 10 comma-separated fields, got " +
                                           std::to_string(f.size()));
    }
    const char* names[] = {"frame", "id", "x", "y", "w", "h", "conf", "class", "visibility", "motion"};
    std::vector<double> reals(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
      const auto v = to_real(f[k]);
      if (!v) throw ParseError(source, lineno, std::string("non-numeric ") + names[k] + " field");
      reals[k] = *v;
    }
    MotRecord r;
    const auto frame = to_integer(f[0]);
    const auto id = to_integer(f[1]);
    const auto cls = to_integer(f[7]);
    if (!frame || !id || !cls) throw ParseError(source, lineno, "frame, id and class must be integers");
    if (*frame < 1) throw ParseError(source, lineno, "frame must be >= 1");
    r.frame = static_cast<int>(*frame);
    r.id = static_cast<int>(*id);
    r.x = reals[2];
    r.y = reals[3];
    r.w = reals[4];
    r.h = reals[5];
    if (!(r.w > 0.0) || !(r.h > 0.0)) throw ParseError(source, lineno, "width and height must be positive");
    r.conf = reals[6];
    r.class_id = static_cast<int>(*cls);
    r.visibility = reals[8];
    if (f.size() == 10) {
      if (!(reals[9] >= 0.0 && reals[9] <= 1.0)) {
        throw ParseError(source, lineno, "motion awareness outside [0,1]");
      }
      r.motion_awareness = reals[9];
    }
    out.push_back(r);
  }
  return out;
}

std::vector<MotRecord> read_mot_records(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_mot_records(in, path.string());
}

std::string format_mot_record(const MotRecord& r) {
  std::string s = std::to_string(r.frame) + "," + std::to_string(r.id) + "," + format_real(r.x) +
                  "," + format_real(r.y) + "," + format_real(r.w) + "," + format_real(r.h) + "," +
                  format_real(r.conf) + "," + std::to_string(r.class_id) + "," +
                  format_real(r.visibility);
  if (r.motion_awareness) s += "," + format_real(*r.motion_awareness);
  return s;
}

void write_mot_records(const std::filesystem::path& path, const std::vector<MotRecord>& records) {
  auto out = open_out(path);
  for (const auto& r : records) out << format_mot_record(r) << '\n';
  finish(out, path);
}

std::map<int, FrameDetections> records_to_detections(const std::vector<MotRecord>& records) {
  std::map<int, FrameDetections> out;
  for (const auto& r : records) {
    Detection d;
    d.frame = r.frame;
    d.bbox = BBox(r.x, r.y, r.w, r.h);
    d.score = r.conf;
    d.class_id = r.class_id;
    d.motion_awareness = r.motion_awareness;
    if (!(d.score >= 0.0 && d.score <= 1.0)) {
      throw DataError("detection in frame " + std::to_string(r.frame) + " has score outside [0,1]");
    }
    d.validate();
    out[r.frame].push_back(std::move(d));
  }
  return out;
}

TrajectorySet records_to_trajectories(const std::vector<MotRecord>& records) {
  std::vector<MotRecord> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const MotRecord& a, const MotRecord& b) { return a.frame < b.frame; });
  TrajectorySet out;
  for (const auto& r : sorted) out.add(r.id, r.frame, BBox(r.x, r.y, r.w, r.h), r.class_id);
  return out;
}

std::map<int, FrameDetections> read_detections(const std::filesystem::path& path) {
  return records_to_detections(read_mot_records(path));
}

TrajectorySet read_trajectories(const std::filesystem::path& path) {
  return records_to_trajectories(read_mot_records(path));
}

std::vector<MotRecord> trajectories_to_records(const TrajectorySet& t) {
  std::map<int, int> cls;
  for (const auto& tr : t.tracks()) cls[tr.id] = tr.class_id;
  std::vector<MotRecord> out;
  for (const auto& [frame, boxes] : t.by_frame()) {
    for (const auto& [id, b] : boxes) {
      MotRecord r;
      r.frame = frame;
      r.id = id;
      r.x = b.x;
      r.y = b.y;
      r.w = b.w;
      r.h = b.h;
      r.conf = 1.0;
      r.class_id = cls[id];
      r.visibility = -1.0;
      out.push_back(r);
    }
  }
  return out;
}

void write_mot_file(const TrajectorySet& t, const std::filesystem::path& path) {
  write_mot_records(path, trajectories_to_records(t));
}

EmbeddingTable parse_embeddings(std::istream& in, const std::string& source) {
  EmbeddingTable out;
  std::string line;
  int lineno = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto f = split_ws(line);
    if (f.empty()) continue;
    if (f.size() < 3) throw ParseError(source, lineno, "expected frame, index and a vector");
    const auto frame = to_integer(f[0]);
    const auto idx = to_integer(f[1]);
    if (!frame || !idx || *frame < 1 || *idx < 0) {
      throw ParseError(source, lineno, "bad frame or detection index");
    }
    std::vector<double> v;
    double n2 = 0.0;
    for (std::size_t k = 2; k < f.size(); ++k) {
      const auto x = to_real(f[k]);
      if (!x) throw ParseError(source, lineno, "non-finite or non-numeric embedding value");
      v.push_back(*x);
      n2 += *x * *x;
    }
    if (dim == 0) dim = v.size();
    if (v.size() != dim) throw ParseError(source, lineno, "inconsistent embedding dimension");
    if (!(n2 > 0.0)) throw ParseError(source, lineno, "zero embedding cannot be normalized");
    const double n = std::sqrt(n2);
    for (double& x : v) x /= n;
    out[{static_cast<int>(*frame), static_cast<int>(*idx)}] = std::move(v);
  }
  return out;
}

EmbeddingTable read_embeddings(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_embeddings(in, path.string());
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingTable& table) {
  auto out = open_out(path);
  for (const auto& [key, v] : table) {
    out << key.first << ' ' << key.second;
    for (double x : v) out << ' ' << format_real(x);
    out << '\n';
  }
  finish(out, path);
}

void attach_embeddings(std::map<int, FrameDetections>& dets, const EmbeddingTable& table) {
  for (const auto& [key, v] : table) {
    const auto it = dets.find(key.first);
    if (it == dets.end() || key.second >= static_cast<int>(it->second.size())) {
      throw DataError("embedding for frame " + std::to_string(key.first) + " index " +
                      std::to_string(key.second) + " has no detection");
    }
    it->second[key.second].embedding = v;
  }
}

CmcSequence parse_cmc(std::istream& in, const std::string& source) {
  CmcSequence out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto f = split_ws(line);
    if (f.empty()) continue;
    if (f.size() != 7) throw ParseError(source, lineno, "expected `frame r11 r12 tx r21 r22 ty`");
    const auto frame = to_integer(f[0]);
    if (!frame || *frame < 1) throw ParseError(source, lineno, "bad frame index");
    double v[6];
    for (int k = 0; k < 6; ++k) {
      const auto x = to_real(f[k + 1]);
      if (!x) throw ParseError(source, lineno, "non-numeric transform entry");
      v[k] = *x;
    }
    out[static_cast<int>(*frame)] = Affine2x3{v[0], v[1], v[2], v[3], v[4], v[5]};
  }
  return out;
}

CmcSequence read_cmc(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_cmc(in, path.string());
}

void write_cmc(const std::filesystem::path& path, const CmcSequence& cmc) {
  auto out = open_out(path);
  for (const auto& [f, m] : cmc) {
    out << f << ' ' << format_real(m.r11) << ' ' << format_real(m.r12) << ' ' << format_real(m.tx)
        << ' ' << format_real(m.r21) << ' ' << format_real(m.r22) << ' ' << format_real(m.ty)
        << '\n';
  }
  finish(out, path);
}

KeyValueFile parse_key_values(std::istream& in, const std::string& source) {
  KeyValueFile kv;
  kv.source = source;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, lineno, "expected `key = value`");
    const std::string key(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    if (key.empty() || value.empty()) throw ParseError(source, lineno, "empty key or value");
    if (kv.entries.count(key)) throw ParseError(source, lineno, "duplicate key `" + key + "`");
    kv.entries[key] = {value, lineno};
  }
  return kv;
}

KeyValueFile read_key_values(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_key_values(in, path.string());
}

double kv_real(const KeyValueFile& kv, const std::string& key) {
  const auto& [value, line] = kv.entries.at(key);
  const auto v = to_real(value);
  if (!v) throw ParseError(kv.source, line, "`" + key + "` expects a number");
  return *v;
}

long long kv_integer(const KeyValueFile& kv, const std::string& key) {
  const auto& [value, line] = kv.entries.at(key);
  const auto v = to_integer(value);
  if (!v) throw ParseError(kv.source, line, "`" + key + "` expects an integer");
  return *v;
}

TrackerConfig tracker_config_from(const KeyValueFile& kv) {
  TrackerConfig cfg;
  for (const auto& [key, entry] : kv.entries) {
    if (key == "tau_high") cfg.tau_high = kv_real(kv, key);
    else if (key == "tau_low") cfg.tau_low = kv_real(kv, key);
    else if (key == "match_thresh_stage1") cfg.match_thresh_stage1 = kv_real(kv, key);
    else if (key == "match_thresh_stage2") cfg.match_thresh_stage2 = kv_real(kv, key);
    else if (key == "n_init") cfg.n_init = static_cast<int>(kv_integer(kv, key));
    else if (key == "max_age") cfg.max_age = static_cast<int>(kv_integer(kv, key));
    else if (key == "lambda_app") cfg.lambda_app = kv_real(kv, key);
    else if (key == "tau_v") cfg.tau_v = kv_real(kv, key);
    else if (key == "ema_alpha") cfg.ema_alpha = kv_real(kv, key);
    else if (key == "v_ema_alpha") cfg.v_ema_alpha = kv_real(kv, key);
    else throw ParseError(kv.source, entry.second, "unknown key `" + key + "`");
  }
  cfg.validate();
  return cfg;
}

std::string format_tracker_config(const TrackerConfig& cfg) {
  std::ostringstream os;
  os << "tau_high = " << format_real(cfg.tau_high) << '\n'
     << "tau_low = " << format_real(cfg.tau_low) << '\n'
     << "match_thresh_stage1 = " << format_real(cfg.match_thresh_stage1) << '\n'
     << "match_thresh_stage2 = " << format_real(cfg.match_thresh_stage2) << '\n'
     << "n_init = " << cfg.n_init << '\n'
     << "max_age = " << cfg.max_age << '\n'
     << "lambda_app = " << format_real(cfg.lambda_app) << '\n'
     << "tau_v = " << format_real(cfg.tau_v) << '\n'
     << "ema_alpha = " << format_real(cfg.ema_alpha) << '\n'
     << "v_ema_alpha = " << format_real(cfg.v_ema_alpha) << '\n';
  return os.str();
}

void write_tensor(const std::filesystem::path& path, const ChannelGrid& g) {
  auto out = open_out(path, true);
  out.write("VSFM", 4);
  const std::uint32_t dims[3] = {static_cast<std::uint32_t>(g.rows()),
                                 static_cast<std::uint32_t>(g.cols()),
                                 static_cast<std::uint32_t>(g.channels())};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  const auto v = g.values();
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
  finish(out, path);
}

bool has_tensor_magic(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  return in.read(magic, 4) && std::memcmp(magic, "VSFM", 4) == 0;
}

FeatureMap read_tensor(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  char magic[4] = {};
  std::uint32_t dims[3] = {};
  if (!in.read(magic, 4) || std::memcmp(magic, "VSFM", 4) != 0) {
    throw DataError(path.string() + ": not a VSFM tensor");
  }
  if (!in.read(reinterpret_cast<char*>(dims), sizeof dims)) {
    throw DataError(path.string() + ": truncated tensor header");
  }
  if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0 || dims[0] > (1u << 20) ||
      dims[1] > (1u << 20) || dims[2] > (1u << 16)) {
    throw DataError(path.string() + ": implausible tensor dimensions");
  }
  FeatureMap m(static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2]));
  auto v = m.values();
  if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()))) {
    throw DataError(path.string() + ": truncated tensor payload");
  }
  if (!m.all_finite()) throw DataError(path.string() + ": non-finite tensor values");
  return m;
}

FusionParams read_fusion_params(const std::filesystem::path& path) {
  const FeatureMap t = read_tensor(path);
  if (t.rows() != t.cols() || t.rows() % 2 != 0 || t.channels() != 1) {
    throw DataError(path.string() + ": fusion weights must be a (2C x 2C x 1) tensor");
  }
  FusionParams p;
  p.channels = t.rows() / 2;
  p.weights.assign(t.values().begin(), t.values().end());
  p.validate();
  return p;
}

Mlp read_mlp(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream all;
  all << in.rdbuf();
  const std::string text = all.str();
  const auto tok = split_ws(text);
  std::size_t k = 0;
  const auto next = [&](bool integer) {
    if (k >= tok.size()) throw DataError(path.string() + ": truncated mlp file");
    std::optional<double> v;
    if (integer) {
      if (const auto i = to_integer(tok[k])) v = static_cast<double>(*i);
    } else {
      v = to_real(tok[k]);
    }
    if (!v) throw DataError(path.string() + ": bad number `" + std::string(tok[k]) + "`");
    ++k;
    return *v;
  };
  Mlp m;
  m.in_dim = static_cast<int>(next(true));
  m.hidden_dim = static_cast<int>(next(true));
  m.out_dim = static_cast<int>(next(true));
  if (m.in_dim < 1 || m.hidden_dim < 1 || m.out_dim < 1) throw DataError(path.string() + ": bad mlp shape");
  const auto fill = [&](std::vector<double>& v, std::size_t n) {
    v.resize(n);
    for (auto& x : v) x = next(false);
  };
  fill(m.w1, static_cast<std::size_t>(m.hidden_dim) * m.in_dim);
  fill(m.b1, static_cast<std::size_t>(m.hidden_dim));
  fill(m.w2, static_cast<std::size_t>(m.out_dim) * m.hidden_dim);
  fill(m.b2, static_cast<std::size_t>(m.out_dim));
  if (k != tok.size()) throw DataError(path.string() + ": trailing values in mlp file");
  m.validate();
  return m;
}

std::vector<Proposal> read_proposals(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<Proposal> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto f = split_ws(line);
    if (f.empty()) continue;
    if (f.size() < 6) throw ParseError(path.string(), lineno, "expected x y w h v_hat f1 ... fd");
    std::vector<double> v;
    for (auto s : f) {
      const auto x = to_real(s);
      if (!x) throw ParseError(path.string(), lineno, "non-numeric field");
      v.push_back(*x);
    }
    if (!(v[2] > 0.0) || !(v[3] > 0.0)) throw ParseError(path.string(), lineno, "nonpositive box size");
    if (!(v[4] >= 0.0 && v[4] <= 1.0)) throw ParseError(path.string(), lineno, "v_hat outside [0,1]");
    if (!out.empty() && out.front().feature.size() != v.size() - 5) {
      throw ParseError(path.string(), lineno, "inconsistent feature length");
    }
    out.push_back({BBox(v[0], v[1], v[2], v[3]), std::vector<double>(v.begin() + 5, v.end()), v[4]});
  }
  return out;
}

void write_proposals(const std::filesystem::path& path, const std::vector<Proposal>& ps) {
  auto out = open_out(path);
  for (const auto& p : ps) {
    out << format_real(p.bbox.x) << ' ' << format_real(p.bbox.y) << ' ' << format_real(p.bbox.w)
        << ' ' << format_real(p.bbox.h) << ' ' << format_real(p.v_hat);
    for (double x : p.feature) out << ' ' << format_real(x);
    out << '\n';
  }
  finish(out, path);
}

}  // namespace sarmot

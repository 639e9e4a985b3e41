#include "kinred/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "kinred/errors.hpp"

namespace kinred {

using nlohmann::json;

namespace {

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffU));
}

std::uint64_t get_u64(const std::string& in, std::size_t at) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + b])) << (8 * b);
  }
  return v;
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(const std::string& in, std::size_t at) { return std::bit_cast<double>(get_u64(in, at)); }

constexpr char kMagic[9] = "KRSNAP01";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string git_blob_hash(const std::string& content) {
  std::string blob = "blob " + std::to_string(content.size());
  blob.push_back('\0');
  blob += content;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
    throw IoError("SHA-1 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string config_hash(const ScenarioConfig& cfg) { return git_blob_hash(scenario_to_json(cfg)); }

std::string encode_snapshots(const KineticTrajectory& traj) {
  const std::uint64_t ntimes = traj.snapshots.size();
  const std::uint64_t cells = static_cast<std::uint64_t>(traj.mesh.cells);
  const std::uint64_t nodes = traj.grid->size();
  std::string out(kMagic, 8);
  out.reserve(kSnapshotHeaderBytes + 8 * ntimes * cells * nodes);
  put_u64(out, ntimes);
  put_u64(out, cells);
  put_u64(out, nodes);
  put_f64(out, traj.grid->half_width());
  put_f64(out, traj.mesh.dx());
  for (const FieldMatrix& s : traj.snapshots) {
    if (static_cast<std::uint64_t>(s.rows()) != cells || static_cast<std::uint64_t>(s.cols()) != nodes) {
      throw ParameterError("encode_snapshots: snapshot shape mismatch");
    }
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      for (Eigen::Index j = 0; j < s.cols(); ++j) put_f64(out, s(i, j));
    }
  }
  return out;
}

SnapshotBlock decode_snapshots(const std::string& bytes) {
  if (bytes.size() < kSnapshotHeaderBytes || bytes.compare(0, 8, kMagic) != 0) {
    throw IoError("snapshot block: bad header");
  }
  SnapshotBlock b;
  b.ntimes = get_u64(bytes, 8);
  b.cells = get_u64(bytes, 16);
  b.nodes = get_u64(bytes, 24);
  b.half_width = get_f64(bytes, 32);
  b.dx = get_f64(bytes, 40);
  const std::uint64_t count = b.ntimes * b.cells * b.nodes;
  if (b.cells == 0 || b.nodes == 0 || bytes.size() != kSnapshotHeaderBytes + 8 * count) {
    throw IoError("snapshot block: payload length does not match the header");
  }
  std::size_t at = kSnapshotHeaderBytes;
  for (std::uint64_t t = 0; t < b.ntimes; ++t) {
    FieldMatrix m(static_cast<Eigen::Index>(b.cells), static_cast<Eigen::Index>(b.nodes));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j, at += 8) m(i, j) = get_f64(bytes, at);
    }
    b.snapshots.push_back(std::move(m));
  }
  return b;
}

std::string trajectory_csv(const std::vector<double>& times,
                           const std::vector<Eigen::VectorXd>& totals,
                           const std::vector<double>& entropy, const std::string& hash) {
  std::string out = "# config_hash " + hash + "\ntime,mass,momentum,energy,entropy\n";
  for (std::size_t t = 0; t < times.size(); ++t) {
    out += format_double(times[t]);
    for (int k = 0; k < 3; ++k) out += "," + format_double(totals[t][k]);
    out += "," + format_double(entropy[t]) + "\n";
  }
  return out;
}

std::string omega_csv(const ReducedTrajectory& traj, const std::string& hash) {
  const int n = traj.manifold.dimension();
  std::string out = "# config_hash " + hash + "\ntime_index,time,cell";
  for (int k = 0; k < n; ++k) out += ",omega_" + std::to_string(k);
  out += "\n";
  for (std::size_t t = 0; t < traj.times.size(); ++t) {
    const std::string prefix = std::to_string(t) + "," + format_double(traj.times[t]) + ",";
    for (std::size_t i = 0; i < traj.omega[t].size(); ++i) {
      out += prefix + std::to_string(i);
      const Eigen::VectorXd& w = traj.omega[t][i].omega;
      for (int k = 0; k < n; ++k) out += "," + format_double(w[k]);
      out += "\n";
    }
  }
  return out;
}

OmegaTable parse_omega_csv(const std::string& text, const Manifold& manifold, int cells) {
  const int n = manifold.dimension();
  OmegaTable table;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (static_cast<int>(fields.size()) != 3 + n) {
      throw IoError("omega table line " + std::to_string(line_no) + ": expected " +
                    std::to_string(3 + n) + " fields");
    }
    try {
      const std::size_t t = std::stoul(fields[0]);
      const int cell = std::stoi(fields[2]);
      if (t == table.times.size()) {
        table.times.push_back(std::stod(fields[1]));
        table.omega.emplace_back();
      }
      if (t + 1 != table.times.size() || cell != static_cast<int>(table.omega.back().size())) {
        throw IoError("rows out of order");
      }
      AnsatzPoint p{manifold, Eigen::VectorXd(n)};
      for (int k = 0; k < n; ++k) p.omega[k] = std::stod(fields[3 + k]);
      table.omega.back().push_back(std::move(p));
    } catch (const std::logic_error&) {
      throw IoError("omega table line " + std::to_string(line_no) + ": malformed number");
    } catch (const IoError& e) {
      throw IoError("omega table line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (const auto& row : table.omega) {
    if (static_cast<int>(row.size()) != cells) throw IoError("omega table: wrong number of cells");
  }
  return table;
}

std::string error_csv(const ErrorReport& r, const std::string& hash) {
  std::string out = "# config_hash " + hash + "\ntime,residual_norm,bound,actual,ratio\n";
  const auto ratio = r.ratio();
  for (std::size_t t = 0; t < r.times.size(); ++t) {
    out += format_double(r.times[t]) + "," + format_double(r.residual_norms[t]) + "," +
           format_double(r.bound[t]) + "," + format_double(r.actual[t]) + "," +
           format_double(ratio[t]) + "\n";
  }
  return out;
}

std::string error_summary_json(const ErrorReport& r, const std::string& hash) {
  const auto ratio = r.ratio();
  double min_ratio = std::numeric_limits<double>::infinity();
  for (double v : ratio) min_ratio = std::min(min_ratio, v);
  json j;
  j["config_hash"] = hash;
  j["p"] = r.p;
  j["lipschitz"] = {{"value", r.lipschitz}, {"kind", "empirical"}};
  j["delta0"] = r.actual.empty() ? 0.0 : r.actual.front();
  j["final_time"] = r.times.empty() ? 0.0 : r.times.back();
  j["final_bound"] = r.bound.empty() ? 0.0 : r.bound.back();
  j["final_actual"] = r.actual.empty() ? 0.0 : r.actual.back();
  // JSON has no infinity; an all-zero error leaves the ratio unbounded.
  j["min_ratio"] = std::isinf(min_ratio) ? json(nullptr) : json(min_ratio);
  j["violated"] = r.violated();
  return j.dump(2) + "\n";
}

std::string manifest_json(const std::string& command, const ScenarioConfig& cfg,
                          const std::vector<ManifestFile>& files, double seconds,
                          const std::vector<std::pair<std::string, double>>& counters) {
  json j;
  j["tool"] = "kinred";
  j["command"] = command;
  j["config_hash"] = config_hash(cfg);
  j["config"] = json::parse(scenario_to_json(cfg));
  json f = json::object();
  for (const auto& file : files) f[file.name] = git_blob_hash(file.content);
  j["files"] = f;
  json c = json::object();
  for (const auto& [k, v] : counters) c[k] = v;
  j["counters"] = c;
  j["timings"] = {{"wall_seconds", seconds}};
  return j.dump(2) + "\n";
}

ScenarioConfig manifest_config(const std::string& text, const std::string& what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    throw ConfigurationError(what + ": manifest is not valid JSON");
  }
  if (!j.is_object() || !j.contains("config")) {
    throw ConfigurationError(what + ": manifest has no config echo");
  }
  return parse_scenario(j.at("config").dump());
}

}  // namespace kinred

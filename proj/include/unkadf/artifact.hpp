#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "unkadf/detail/sha256.hpp"
#include "unkadf/errors.hpp"
#include "unkadf/lstm.hpp"

namespace unkadf {

inline constexpr int kArtifactFormatVersion = 1;

/// Free-form key-value pairs echoed into the artifact header: source mode
/// label, training config, creation timestamp. Serialized sorted by key so
/// the file is canonical regardless of insertion order.
struct ArtifactMetadata {
  std::vector<std::pair<std::string, std::string>> entries;

  void set(const std::string& key, const std::string& value) {
    for (auto& e : entries) {
      if (e.first == key) {
        e.second = value;
        return;
      }
    }
    entries.emplace_back(key, value);
  }

  const std::string* find(const std::string& key) const {
    for (const auto& e : entries) {
      if (e.first == key) return &e.second;
    }
    return nullptr;
  }
};

/// The shareable object: the frozen LSTM_A cell plus its dimensions and a
/// metadata echo. By construction it carries no encoder, predictor, or
/// decoder weights and no demand values; that exclusion is the privacy
/// boundary of the whole scheme.
struct PretrainedArtifact {
  int format_version = kArtifactFormatVersion;
  int embed_dim = 0;   // K, width of the encoder output LSTM_A consumes
  int hidden_dim = 0;  // m
  LstmCellParams lstm_a;
  ArtifactMetadata metadata;
  std::string checksum;  // filled by save/load
};

namespace detail {

inline const char* const kArtifactSectionNames[12] = {"W_i", "W_f", "W_o", "W_g",
                                                      "U_i", "U_f", "U_o", "U_g",
                                                      "b_i", "b_f", "b_o", "b_g"};

inline void check_artifact_dims(const PretrainedArtifact& a) {
  if (a.embed_dim <= 0 || a.hidden_dim <= 0) {
    throw errors::malformed_artifact("artifact dims must be positive, got K=" +
                                     std::to_string(a.embed_dim) + " m=" +
                                     std::to_string(a.hidden_dim));
  }
  const auto params = a.lstm_a.params();
  const std::size_t m = static_cast<std::size_t>(a.hidden_dim);
  const std::size_t k = static_cast<std::size_t>(a.embed_dim);
  for (int idx = 0; idx < 12; ++idx) {
    const std::size_t want_cols = idx < 4 ? k : (idx < 8 ? m : 1);
    if (params[idx]->rows() != m || params[idx]->cols() != want_cols) {
      throw errors::malformed_artifact(std::string("section ") + kArtifactSectionNames[idx] +
                                       " is " + shape_str(params[idx]->value) + ", expected " +
                                       std::to_string(m) + "x" + std::to_string(want_cols));
    }
  }
}

}  // namespace detail

/// Canonical byte serialization including the trailing checksum line.
inline std::string artifact_to_bytes(const PretrainedArtifact& a) {
  if (a.format_version != kArtifactFormatVersion) {
    throw errors::bad_version("cannot write format_version " + std::to_string(a.format_version));
  }
  detail::check_artifact_dims(a);
  for (const Param* p : a.lstm_a.params()) {
    if (!all_finite(p->value)) {
      throw errors::refuse_to_save("non-finite weight in " + p->name);
    }
  }

  std::string out;
  out += "format_version=" + std::to_string(a.format_version) + "\n";
  out += "embed_dim=" + std::to_string(a.embed_dim) + "\n";
  out += "hidden_dim=" + std::to_string(a.hidden_dim) + "\n";

  std::vector<std::pair<std::string, std::string>> meta = a.metadata.entries;
  std::sort(meta.begin(), meta.end());
  for (const auto& [key, value] : meta) {
    if (key.empty() || key.find('=') != std::string::npos ||
        key.find('\n') != std::string::npos || value.find('\n') != std::string::npos) {
      throw errors::config("metadata entry '" + key + "' is not a single key=value line");
    }
    out += "meta." + key + "=" + value + "\n";
  }

  const auto params = a.lstm_a.params();
  char buf[32];
  for (int idx = 0; idx < 12; ++idx) {
    const Matrix& w = params[idx]->value;
    out += std::string("weights ") + detail::kArtifactSectionNames[idx] + " " +
           std::to_string(w.rows()) + " " + std::to_string(w.cols()) + "\n";
    for (std::size_t r = 0; r < w.rows(); ++r) {
      for (std::size_t c = 0; c < w.cols(); ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", w(r, c));
        out += buf;
        out += (c + 1 < w.cols() ? ' ' : '\n');
      }
    }
  }

  out += "checksum=" + detail::Sha256::hex(out) + "\n";
  return out;
}

/// Parses and verifies canonical bytes; `origin` only labels error messages.
inline PretrainedArtifact artifact_from_bytes(const std::string& bytes, const std::string& origin) {
  const std::size_t mark = bytes.rfind("\nchecksum=");
  if (mark == std::string::npos || bytes.back() != '\n') {
    throw errors::malformed_artifact(origin + ": missing checksum line");
  }
  const std::string payload = bytes.substr(0, mark + 1);
  const std::string stored = bytes.substr(mark + 10, bytes.size() - mark - 11);
  if (stored.size() != 64 || stored.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw errors::malformed_artifact(origin + ": checksum line is not 64 hex digits");
  }
  if (detail::Sha256::hex(payload) != stored) {
    throw errors::corruption(origin + ": checksum mismatch");
  }

  std::istringstream in(payload);
  std::string line;

  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) {
      throw errors::malformed_artifact(origin + ": truncated before " + what);
    }
  };
  auto header_value = [&](const std::string& key) {
    if (line.rfind(key + "=", 0) != 0) {
      throw errors::malformed_artifact(origin + ": expected '" + key + "=', got '" + line + "'");
    }
    return line.substr(key.size() + 1);
  };
  auto parse_int = [&](const std::string& text, const char* what) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw errors::malformed_artifact(origin + ": bad " + what + " '" + text + "'");
    }
    return v;
  };

  PretrainedArtifact a;
  next_line("format_version");
  a.format_version = parse_int(header_value("format_version"), "format_version");
  if (a.format_version != kArtifactFormatVersion) {
    throw errors::bad_version(origin + ": unknown format_version " +
                              std::to_string(a.format_version));
  }
  next_line("embed_dim");
  a.embed_dim = parse_int(header_value("embed_dim"), "embed_dim");
  next_line("hidden_dim");
  a.hidden_dim = parse_int(header_value("hidden_dim"), "hidden_dim");
  if (a.embed_dim <= 0 || a.hidden_dim <= 0) {
    throw errors::malformed_artifact(origin + ": dims must be positive");
  }

  next_line("metadata or weights");
  while (line.rfind("meta.", 0) == 0) {
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw errors::malformed_artifact(origin + ": metadata line without '=': " + line);
    }
    a.metadata.set(line.substr(5, eq - 5), line.substr(eq + 1));
    next_line("weights");
  }

  a.lstm_a = LstmCellParams::zeros("lstm_A", static_cast<std::size_t>(a.embed_dim),
                                   static_cast<std::size_t>(a.hidden_dim));
  const auto params = a.lstm_a.params();
  for (int idx = 0; idx < 12; ++idx) {
    if (idx > 0) next_line("weights section");
    std::istringstream head(line);
    std::string tag, name;
    std::size_t rows = 0, cols = 0;
    head >> tag >> name >> rows >> cols;
    if (tag != "weights" || name != detail::kArtifactSectionNames[idx] || head.fail()) {
      throw errors::malformed_artifact(origin + ": expected section " +
                                       detail::kArtifactSectionNames[idx] + ", got '" + line + "'");
    }
    Matrix& w = params[idx]->value;
    if (rows != w.rows() || cols != w.cols()) {
      throw errors::malformed_artifact(origin + ": section " + name + " declares " +
                                       std::to_string(rows) + "x" + std::to_string(cols) +
                                       ", dims require " + shape_str(w));
    }
    for (std::size_t r = 0; r < rows; ++r) {
      next_line("weight row");
      const char* cursor = line.data();
      const char* end = line.data() + line.size();
      for (std::size_t c = 0; c < cols; ++c) {
        while (cursor < end && *cursor == ' ') ++cursor;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(cursor, end, v);
        if (ec != std::errc() || ptr == cursor || !std::isfinite(v)) {
          throw errors::malformed_artifact(origin + ": bad weight value in section " + name);
        }
        w(r, c) = v;
        cursor = ptr;
      }
      while (cursor < end && *cursor == ' ') ++cursor;
      if (cursor != end) {
        throw errors::malformed_artifact(origin + ": trailing data in a row of section " + name);
      }
    }
  }
  if (std::getline(in, line)) {
    throw errors::malformed_artifact(origin + ": unexpected content after weights: '" + line + "'");
  }

  a.lstm_a.set_frozen(true);
  a.checksum = stored;
  return a;
}

/// Writes the canonical form atomically (temp file then rename) and returns
/// the checksum.
inline std::string save_artifact(const PretrainedArtifact& a, const std::string& path) {
  const std::string bytes = artifact_to_bytes(a);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw errors::io("cannot open " + tmp + " for writing");
    out << bytes;
    out.flush();
    if (!out) {
      std::error_code ignore;
      std::filesystem::remove(tmp, ignore);
      throw errors::io("write failed for " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    std::filesystem::remove(tmp, ignore);
    throw errors::io("cannot rename " + tmp + " to " + path + ": " + ec.message());
  }
  const std::size_t mark = bytes.rfind("\nchecksum=");
  return bytes.substr(mark + 10, bytes.size() - mark - 11);
}

inline PretrainedArtifact load_artifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw errors::io("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) throw errors::io("read failed for " + path);
  const std::string bytes = buf.str();
  if (bytes.empty()) throw errors::malformed_artifact(path + ": empty file");
  return artifact_from_bytes(bytes, path);
}

}  // namespace unkadf

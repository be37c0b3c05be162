#include "subshift/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "subshift/errors.hpp"
#include "subshift/rng.hpp"

namespace subshift {

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

double parse_double(std::string_view tok, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw DataError("dataset line " + std::to_string(line_no) + ": bad number '" +
                    std::string(tok) + "'");
  }
  return v;
}

long parse_long(std::string_view tok, std::size_t line_no) {
  long v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw DataError("dataset line " + std::to_string(line_no) + ": bad integer '" +
                    std::string(tok) + "'");
  }
  return v;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::uint64_t provenance_hash(const std::string& s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void write_dataset(const std::filesystem::path& path, const SampleSet& set) {
  set.validate();
  std::string out;
  out.reserve(set.size() * (static_cast<std::size_t>(set.dimension) * 10 + 8));
  out += std::to_string(set.dimension);
  out += ',';
  out += std::to_string(set.class_count);
  out += '\n';
  for (const Example& ex : set.examples) {
    out += std::to_string(ex.class_label);
    out += ',';
    out += std::to_string(ex.subgroup_tag);
    for (Eigen::Index i = 0; i < ex.features.size(); ++i) {
      out += ',';
      append_double(out, ex.features[i]);
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw MissingInputError("cannot open for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("write failed: " + path.string());
}

SampleSet read_dataset(const std::filesystem::path& path, const std::string& provenance) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MissingInputError("cannot open dataset: " + path.string());

  SampleSet set;
  set.provenance = provenance;
  const std::uint64_t ns = provenance_hash(provenance);

  std::string line;
  if (!std::getline(f, line)) throw DataError("empty dataset file: " + path.string());
  {
    const auto toks = split_commas(line);
    if (toks.size() != 2) throw DataError("dataset header must be 'd,C': " + path.string());
    set.dimension = static_cast<Eigen::Index>(parse_long(toks[0], 1));
    set.class_count = static_cast<int>(parse_long(toks[1], 1));
  }

  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto toks = split_commas(line);
    if (toks.size() != static_cast<std::size_t>(set.dimension) + 2) {
      throw DataError("dataset line " + std::to_string(line_no) + ": expected " +
                      std::to_string(set.dimension + 2) + " fields, got " +
                      std::to_string(toks.size()));
    }
    Example ex;
    ex.class_label = static_cast<int>(parse_long(toks[0], line_no));
    ex.subgroup_tag = static_cast<int>(parse_long(toks[1], line_no));
    ex.features.resize(set.dimension);
    for (Eigen::Index i = 0; i < set.dimension; ++i) {
      ex.features[i] = parse_double(toks[static_cast<std::size_t>(i) + 2], line_no);
    }
    ex.origin = derive_seed(ns, {static_cast<std::uint64_t>(set.examples.size())});
    set.examples.push_back(std::move(ex));
  }
  if (set.empty()) throw DataError("dataset has no examples: " + path.string());
  set.validate();
  return set;
}

}  // namespace subshift

// SPDX-License-Identifier: Apache-2.0
#include "awp/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "awp/error.hpp"
#include "awp/util.hpp"

namespace awp::model {
namespace {

constexpr std::string_view kMagic = "AWPM";

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view raw(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw DataError("checkpoint truncated at byte " + std::to_string(pos_));
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(raw(1)[0]); }
  std::uint32_t u32() {
    const auto s = raw(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[i]);
    return v;
  }
  std::uint64_t u64() {
    const auto s = raw(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[i]);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto n = u32();
    return std::string(raw(n));
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void write_header(Writer& w, const CheckpointHeader& h) {
  const Dims& d = h.dims;
  w.u8(static_cast<std::uint8_t>(d.variant));
  w.u8(static_cast<std::uint8_t>(d.objective));
  for (int v : {d.embed, d.hidden, d.code_vocab, d.ast_vocab, d.summary_vocab, d.classes}) {
    w.u32(static_cast<std::uint32_t>(v));
  }
  w.u8(static_cast<std::uint8_t>(h.input.variant));
  w.u8(static_cast<std::uint8_t>(h.input.mode));
  w.u64(h.input.max_code_len);
  w.u64(h.input.max_ast_len);
  w.u64(h.input.max_summary_len);
  w.u64(h.seed);
  w.u64(h.code_vocab_hash);
  w.u64(h.ast_vocab_hash);
  w.u64(h.summary_vocab_hash);
  w.u64(h.class_map_hash);
  w.str(h.provenance);
}

template <class E>
E read_enum(Reader& r, int count, const char* what) {
  const auto v = r.u8();
  if (v >= count) throw DataError(std::string("checkpoint: bad ") + what);
  return static_cast<E>(v);
}

CheckpointHeader read_header(Reader& r) {
  CheckpointHeader h;
  Dims& d = h.dims;
  d.variant = read_enum<Variant>(r, 2, "variant");
  d.objective = read_enum<Objective>(r, 2, "objective");
  for (int* v : {&d.embed, &d.hidden, &d.code_vocab, &d.ast_vocab, &d.summary_vocab, &d.classes}) {
    *v = static_cast<int>(r.u32());
  }
  if (d.embed < 1 || d.hidden < 1) throw DataError("checkpoint: bad dimensions");
  h.input.variant = read_enum<Variant>(r, 2, "variant");
  h.input.mode = read_enum<Mode>(r, 2, "mode");
  h.input.max_code_len = r.u64();
  h.input.max_ast_len = r.u64();
  h.input.max_summary_len = r.u64();
  h.seed = r.u64();
  h.code_vocab_hash = r.u64();
  h.ast_vocab_hash = r.u64();
  h.summary_vocab_hash = r.u64();
  h.class_map_hash = r.u64();
  h.provenance = r.str();
  return h;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& checkpoint) {
  if (!checkpoint.params.all_finite()) throw NumericError("refusing to save non-finite parameters");
  if (!(checkpoint.params.dims == checkpoint.header.dims)) {
    throw UsageError("checkpoint header dims disagree with parameters");
  }
  Writer w;
  w.raw(kMagic);
  w.u32(kCheckpointVersion);
  write_header(w, checkpoint.header);

  std::uint32_t count = 0;
  checkpoint.params.visit([&](const std::string&, const auto&) { ++count; });
  w.u32(count);
  checkpoint.params.visit([&](const std::string& name, const auto& a) {
    w.str(name);
    const bool vector = a.ColsAtCompileTime == 1;
    w.u32(vector ? 1 : 2);
    w.u64(static_cast<std::uint64_t>(a.rows()));
    if (!vector) w.u64(static_cast<std::uint64_t>(a.cols()));
    // Row-major on disk regardless of Eigen's storage order.
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) w.f64(a(i, j));
    }
  });
  return w.take();
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (bytes.size() < kMagic.size() || r.raw(kMagic.size()) != kMagic) {
    throw DataError("not a checkpoint file (bad magic)");
  }
  const auto version = r.u32();
  if (version != kCheckpointVersion) {
    throw DataError("checkpoint version " + std::to_string(version) + " unsupported (expected " +
                    std::to_string(kCheckpointVersion) + ")");
  }
  Checkpoint c;
  c.header = read_header(r);
  c.params = ModelParams::zeros(c.header.dims);

  std::uint32_t expected = 0;
  c.params.visit([&](const std::string&, const auto&) { ++expected; });
  const auto count = r.u32();
  if (count != expected) throw DataError("checkpoint: array count mismatch");

  c.params.visit([&](const std::string& name, auto& a) {
    const auto stored = r.str();
    if (stored != name) throw DataError("checkpoint: expected array '" + name + "', found '" + stored + "'");
    const bool vector = a.ColsAtCompileTime == 1;
    const auto rank = r.u32();
    if (rank != (vector ? 1u : 2u)) throw DataError("checkpoint: bad rank for " + name);
    const auto rows = r.u64();
    const auto cols = vector ? 1 : r.u64();
    if (rows != static_cast<std::uint64_t>(a.rows()) || cols != static_cast<std::uint64_t>(a.cols())) {
      throw DataError("checkpoint: shape mismatch for " + name);
    }
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = r.f64();
    }
  });
  if (!r.done()) throw DataError("checkpoint: trailing bytes");
  if (!c.params.all_finite()) throw NumericError("checkpoint holds non-finite parameters");
  return c;
}

void save_params(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  write_file_atomic(path, serialize_checkpoint(checkpoint));
}

Checkpoint load_params(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("checkpoint not found: " + path.string());
  return deserialize_checkpoint(read_file(path));
}

Checkpoint load_params(const std::filesystem::path& path, const VocabSet& vocabs,
                       std::uint64_t class_map_hash) {
  Checkpoint c = load_params(path);
  const auto& h = c.header;
  if (h.code_vocab_hash != vocabs.code.content_hash()) throw DataError("checkpoint: code vocabulary hash mismatch");
  if (h.dims.variant == Variant::ast_attendgru && h.ast_vocab_hash != vocabs.ast.content_hash()) {
    throw DataError("checkpoint: AST vocabulary hash mismatch");
  }
  if (h.summary_vocab_hash != vocabs.summary.content_hash()) {
    throw DataError("checkpoint: summary vocabulary hash mismatch");
  }
  if (h.class_map_hash != class_map_hash) throw DataError("checkpoint: class map hash mismatch");
  return c;
}

std::uint64_t class_map_hash(const text::ClassMap& class_map) {
  std::uint64_t h = kFnvOffset;
  for (const auto& s : class_map.stems()) {
    h = fnv1a(s, h);
    h = fnv1a(std::string_view("\n", 1), h);
  }
  return h;
}

}  // namespace awp::model

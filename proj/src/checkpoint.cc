// Copyright 2026 The coopmarl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "coopmarl/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "coopmarl/error.h"

namespace coopmarl {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'C', 'M', 'A', 'R', 'L', 'Q', 'F', '\0'};

class Writer {
 public:
  explicit Writer(std::ofstream& out) : out_(out) {}

  template <typename T>
  void Put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  template <typename T>
  void PutArray(std::span<const T> v) {
    out_.write(reinterpret_cast<const char*>(v.data()), v.size_bytes());
  }

 private:
  std::ofstream& out_;
};

class Reader {
 public:
  Reader(std::ifstream& in, const std::string& path) : in_(in), path_(path) {}

  template <typename T>
  T Get() {
    T v;
    Read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
  }
  template <typename T>
  void GetArray(std::span<T> v) {
    Read(reinterpret_cast<char*>(v.data()), v.size_bytes());
  }

 private:
  void Read(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    Check(static_cast<std::size_t>(in_.gcount()) == n,
          ErrorCategory::kCheckpointIncompatible,
          "checkpoint " + path_ + " is truncated");
  }

  std::ifstream& in_;
  const std::string& path_;
};

void WriteOne(Writer& w, const QFunction& q) {
  if (const auto* t = dynamic_cast<const TabularQ*>(&q)) {
    const QTable& table = t->table();
    w.Put<std::uint32_t>(0);
    w.Put<std::int64_t>(table.num_states());
    w.Put<std::int32_t>(table.num_actions1());
    w.Put<std::int32_t>(table.num_actions2());
    w.Put<double>(table.default_value());
    w.Put<std::uint32_t>(t->rule() == StepSizeRule::kConstant ? 0 : 1);
    w.Put<double>(t->constant_alpha());
    w.PutArray(table.values());
    w.PutArray(t->visit_counts());
    return;
  }
  const auto& a = dynamic_cast<const ApproximatorQ&>(q);
  w.Put<std::uint32_t>(1);
  w.Put<std::int32_t>(a.num_actions1());
  w.Put<std::int32_t>(a.num_actions2());
  w.Put<double>(a.options().learning_rate);
  w.Put<double>(a.options().clip_norm);
  w.Put<std::int32_t>(a.options().target_refresh);
  w.Put<std::int64_t>(a.fit_calls());
  const std::vector<int>& sizes = a.online().layer_sizes();
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(sizes.size()));
  for (int s : sizes) w.Put<std::int32_t>(s);
  w.PutArray(a.online().parameters());
  w.PutArray(a.target().parameters());
}

std::unique_ptr<QFunction> ReadOne(Reader& r, const std::string& path) {
  const auto kind = r.Get<std::uint32_t>();
  if (kind == 0) {
    const auto states = r.Get<std::int64_t>();
    const auto a1 = r.Get<std::int32_t>();
    const auto a2 = r.Get<std::int32_t>();
    const auto def = r.Get<double>();
    const auto rule = r.Get<std::uint32_t>();
    const auto alpha = r.Get<double>();
    Check(states > 0 && states < (std::int64_t{1} << 32) && a1 > 0 && a2 > 0 &&
              a1 <= 4096 && a2 <= 4096 && rule <= 1,
          ErrorCategory::kCheckpointIncompatible,
          "checkpoint " + path + " has an invalid table header");
    auto q = std::make_unique<TabularQ>(
        QTable(states, a1, a2, def),
        rule == 0 ? StepSizeRule::kConstant : StepSizeRule::kVisitCount,
        alpha);
    r.GetArray(q->mutable_table().mutable_values());
    r.GetArray(q->mutable_visit_counts());
    return q;
  }
  Check(kind == 1, ErrorCategory::kCheckpointIncompatible,
        "checkpoint " + path + " has an unknown backend kind");
  const auto a1 = r.Get<std::int32_t>();
  const auto a2 = r.Get<std::int32_t>();
  ApproximatorOptions options;
  options.learning_rate = r.Get<double>();
  options.clip_norm = r.Get<double>();
  options.target_refresh = r.Get<std::int32_t>();
  const auto fit_calls = r.Get<std::int64_t>();
  const auto layers = r.Get<std::uint32_t>();
  Check(layers >= 2 && layers <= 64, ErrorCategory::kCheckpointIncompatible,
        "checkpoint " + path + " has an invalid layer count");
  std::vector<int> sizes(layers);
  for (int& s : sizes) {
    s = r.Get<std::int32_t>();
    Check(s > 0 && s <= (1 << 16), ErrorCategory::kCheckpointIncompatible,
          "checkpoint " + path + " has an invalid layer size");
  }
  DenseApproximator net(sizes);
  r.GetArray(net.mutable_parameters());
  DenseApproximator target(sizes);
  r.GetArray(target.mutable_parameters());
  auto q = std::make_unique<ApproximatorQ>(std::move(net), a1, a2, options);
  q->mutable_target() = std::move(target);
  q->set_fit_calls(fit_calls);
  return q;
}

}  // namespace

void SaveCheckpoint(const std::string& path, const QFunction& q1,
                    const QFunction& q2) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Check(out.good(), ErrorCategory::kIo, "cannot write checkpoint " + path);
  Writer w(out);
  out.write(kMagic, sizeof(kMagic));
  w.Put<std::uint32_t>(kCheckpointVersion);
  w.Put<std::uint32_t>(2);
  WriteOne(w, q1);
  WriteOne(w, q2);
  out.flush();
  Check(out.good(), ErrorCategory::kIo, "failed writing checkpoint " + path);
}

QPair LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Check(in.good(), ErrorCategory::kIo, "cannot read checkpoint " + path);
  Reader r(in, path);
  char magic[8];
  r.GetArray(std::span<char>(magic));
  Check(std::memcmp(magic, kMagic, sizeof(kMagic)) == 0,
        ErrorCategory::kCheckpointIncompatible,
        path + " is not a coopmarl checkpoint");
  const auto version = r.Get<std::uint32_t>();
  Check(version == kCheckpointVersion, ErrorCategory::kCheckpointIncompatible,
        "checkpoint " + path + " has format version " +
            std::to_string(version) + ", expected " +
            std::to_string(kCheckpointVersion));
  const auto count = r.Get<std::uint32_t>();
  Check(count == 2, ErrorCategory::kCheckpointIncompatible,
        "checkpoint " + path + " must hold two Q-functions");
  QPair pair;
  pair.q1 = ReadOne(r, path);
  pair.q2 = ReadOne(r, path);
  return pair;
}

}  // namespace coopmarl

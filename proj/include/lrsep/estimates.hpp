#pragma once

// Time-averaged estimates with batch-means error bars.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lrsep {

inline constexpr int kDefaultBatches = 32;
inline constexpr int kMinConfidentBatches = 20;

struct RunEstimate {
  std::string name;
  double mean = 0.0;
  double std_error = 0.0;
  double total_time = 0.0;
  int batches = 0;
  std::uint64_t replica = 0;
  bool valid = false;
  bool low_confidence = true;
  std::vector<double> batch_means;
};

/// Mean and standard error from equal-length batch averages.
inline RunEstimate batch_means_estimate(std::string name, std::vector<double> batch_values, double total_time,
                                        std::uint64_t replica) {
  RunEstimate e;
  e.name = std::move(name);
  e.total_time = total_time;
  e.replica = replica;
  e.batches = static_cast<int>(batch_values.size());
  if (!(total_time > 0.0) || batch_values.empty()) return e;
  double sum = 0.0;
  for (double b : batch_values) sum += b;
  e.mean = sum / e.batches;
  if (e.batches > 1) {
    double ss = 0.0;
    for (double b : batch_values) ss += (b - e.mean) * (b - e.mean);
    e.std_error = std::sqrt(ss / (e.batches - 1) / e.batches);
  }
  e.valid = true;
  e.low_confidence = e.batches < kMinConfidentBatches;
  e.batch_means = std::move(batch_values);
  return e;
}

/// Combines independent replicas of the same observable: average of the
/// replica means with error sqrt(sum se_i^2)/R.
inline RunEstimate merge_replicas(const std::vector<RunEstimate>& parts) {
  if (parts.empty()) throw std::invalid_argument("merge_replicas needs at least one estimate");
  RunEstimate m;
  m.name = parts.front().name;
  m.replica = parts.front().replica;
  m.valid = true;
  m.low_confidence = false;
  double var = 0.0;
  for (const auto& p : parts) {
    if (p.name != m.name) throw std::invalid_argument("merge_replicas: mixed observables");
    m.mean += p.mean;
    var += p.std_error * p.std_error;
    m.total_time += p.total_time;
    m.batches += p.batches;
    m.valid = m.valid && p.valid;
    m.low_confidence = m.low_confidence || p.low_confidence;
    m.batch_means.insert(m.batch_means.end(), p.batch_means.begin(), p.batch_means.end());
  }
  const auto r = static_cast<double>(parts.size());
  m.mean /= r;
  m.std_error = std::sqrt(var) / r;
  return m;
}

/// Splits a measurement window [0, batches * length) into equal-time batches.
/// `advance` hands each piece of an interval to `piece(batch, dt)` and reports
/// every completed batch through `close(batch, t_end)`.
class BatchTimer {
 public:
  BatchTimer() = default;
  BatchTimer(double total, int batches) : length_(total / batches), batches_(batches) {
    if (batches < 1) throw std::invalid_argument("need at least one batch");
  }

  int batches() const { return batches_; }
  double length() const { return length_; }
  int current() const { return current_; }
  double now() const { return t_; }
  bool done() const { return current_ >= batches_; }

  template <class Piece, class Close>
  void advance(double dt, Piece&& piece, Close&& close) {
    while (current_ < batches_) {
      const double end = (current_ + 1) * length_;
      if (t_ + dt < end) {
        piece(current_, dt);
        t_ += dt;
        return;
      }
      const double part = end - t_;
      piece(current_, part);
      dt -= part;
      t_ = end;
      close(current_, end);
      ++current_;
    }
  }

  /// Closes any batch left open by round-off at the end of the window.
  template <class Close>
  void finish(Close&& close) {
    while (current_ < batches_) {
      const double end = (current_ + 1) * length_;
      t_ = end;
      close(current_, end);
      ++current_;
    }
  }

 private:
  double length_ = 0.0;
  int batches_ = 0;
  int current_ = 0;
  double t_ = 0.0;
};

}  // namespace lrsep

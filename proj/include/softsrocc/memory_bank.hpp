#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "softsrocc/soft_rank.hpp"

namespace softsrocc {

struct BankEntry {
  double score = 0.0;
  std::int64_t epoch_stamp = 0;
};

/// A memory bank assembled with the current batch. Current-batch elements
/// come first (live), then bank entries absent from the batch in sorted id
/// order (constants). `mos` and `ids` align element-for-element with
/// `preds.values`.
struct Assembly {
  GradTaggedScores preds;
  std::vector<double> mos;
  std::vector<std::string> ids;
};

/// Two dictionaries keyed by sample id: past predictions (plain scalars,
/// no gradient) and their ground-truth labels. Single-writer; a const
/// MemoryBank may be read concurrently.
class MemoryBank {
 public:
  explicit MemoryBank(std::int64_t retention_epochs = 1);

  /// Overwrites predictions and stamps them with `epoch`. Labels are
  /// inserted on first sight and must match (within 1e-9) afterwards.
  /// Validates the whole batch before mutating anything.
  void update(std::span<const std::string> ids,
              std::span<const double> preds,
              std::span<const double> mos,
              std::int64_t epoch);

  Assembly assemble(std::span<const std::string> current_ids,
                    std::span<const double> current_preds,
                    std::span<const double> current_mos) const;

  /// Drops every entry with epoch_stamp <= current_epoch - retention.
  void evict(std::int64_t current_epoch);

  std::size_t size() const noexcept { return predicted_.size(); }
  bool empty() const noexcept { return predicted_.empty(); }
  bool contains(const std::string& id) const { return predicted_.count(id) != 0; }
  std::int64_t retention_epochs() const noexcept { return retention_; }

  const std::map<std::string, BankEntry>& predicted() const noexcept { return predicted_; }
  const std::map<std::string, BankEntry>& ground_truth() const noexcept { return ground_truth_; }

  /// Checkpoint as `sample_id,pred,mos,epoch_stamp` lines (with that header),
  /// numbers at 17 significant digits.
  void save(std::ostream& out) const;
  static MemoryBank load(std::istream& in, std::int64_t retention_epochs);

 private:
  std::int64_t retention_;
  std::map<std::string, BankEntry> predicted_;
  std::map<std::string, BankEntry> ground_truth_;
};

}  // namespace softsrocc

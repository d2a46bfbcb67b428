#include "softsrocc/memory_bank.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "softsrocc/errors.hpp"
#include "softsrocc/score_file.hpp"

namespace softsrocc {

namespace {

constexpr double kLabelTolerance = 1e-9;
constexpr const char* kBankHeader = "sample_id,pred,mos,epoch_stamp";

void require_ids(std::span<const std::string> ids, std::size_t expected) {
  if (ids.size() != expected) {
    throw Error(ErrorCode::LengthMismatch, "ids and scores differ in length");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate sample id in batch: " + id);
    }
  }
}

}  // namespace

MemoryBank::MemoryBank(std::int64_t retention_epochs) : retention_(retention_epochs) {
  if (retention_epochs < 1) {
    throw Error(ErrorCode::InvalidConfig, "retention_epochs must be >= 1");
  }
}

void MemoryBank::update(std::span<const std::string> ids,
                        std::span<const double> preds,
                        std::span<const double> mos,
                        std::int64_t epoch) {
  detail::require_same_length(preds, mos);
  require_ids(ids, preds.size());
  detail::require_finite(preds, "bank predictions");
  detail::require_finite(mos, "bank labels");
  if (epoch < 0) throw Error(ErrorCode::InvalidArgument, "epoch must be non-negative");

  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (auto it = ground_truth_.find(ids[i]); it != ground_truth_.end()) {
      if (std::abs(it->second.score - mos[i]) > kLabelTolerance) {
        throw Error(ErrorCode::LabelConflict, "label for '" + ids[i] + "' changed");
      }
    }
    if (auto it = predicted_.find(ids[i]); it != predicted_.end()) {
      if (epoch < it->second.epoch_stamp) {
        throw Error(ErrorCode::InvalidArgument, "epoch stamp would decrease for '" + ids[i] + "'");
      }
    }
  }

  for (std::size_t i = 0; i < ids.size(); ++i) {
    predicted_[ids[i]] = BankEntry{preds[i], epoch};
    auto [it, inserted] = ground_truth_.try_emplace(ids[i], BankEntry{mos[i], epoch});
    if (!inserted) it->second.epoch_stamp = epoch;
  }
}

Assembly MemoryBank::assemble(std::span<const std::string> current_ids,
                              std::span<const double> current_preds,
                              std::span<const double> current_mos) const {
  detail::require_same_length(current_preds, current_mos);
  require_ids(current_ids, current_preds.size());

  Assembly out;
  const std::size_t extra = predicted_.size();
  out.preds.values.reserve(current_preds.size() + extra);
  out.preds.grad_mask.reserve(current_preds.size() + extra);
  out.mos.reserve(current_preds.size() + extra);
  out.ids.reserve(current_preds.size() + extra);

  const std::set<std::string_view> current(current_ids.begin(), current_ids.end());
  for (std::size_t i = 0; i < current_ids.size(); ++i) {
    out.preds.values.push_back(current_preds[i]);
    out.preds.grad_mask.push_back(1);
    out.mos.push_back(current_mos[i]);
    out.ids.push_back(current_ids[i]);
  }
  for (const auto& [id, entry] : predicted_) {
    if (current.count(id)) continue;  // the fresh value shadows the stale copy
    out.preds.values.push_back(entry.score);
    out.preds.grad_mask.push_back(0);
    out.mos.push_back(ground_truth_.at(id).score);
    out.ids.push_back(id);
  }
  return out;
}

void MemoryBank::evict(std::int64_t current_epoch) {
  const std::int64_t cutoff = current_epoch - retention_;
  for (auto it = predicted_.begin(); it != predicted_.end();) {
    if (it->second.epoch_stamp <= cutoff) {
      ground_truth_.erase(it->first);
      it = predicted_.erase(it);
    } else {
      ++it;
    }
  }
}

void MemoryBank::save(std::ostream& out) const {
  out << kBankHeader << '\n';
  for (const auto& [id, entry] : predicted_) {
    out << id << ',' << format_double(entry.score) << ','
        << format_double(ground_truth_.at(id).score) << ',' << entry.epoch_stamp << '\n';
  }
}

MemoryBank MemoryBank::load(std::istream& in, std::int64_t retention_epochs) {
  MemoryBank bank(retention_epochs);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || line != kBankHeader) {
    throw Error(ErrorCode::ParseError, "line 1: expected header '" + std::string(kBankHeader) + "'");
  }
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 4 fields");
    }
    const std::string& id = fields[0];
    if (id.empty() || bank.predicted_.count(id)) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": empty or duplicate sample id");
    }
    const double pred = parse_double(fields[1], line_no);
    const double mos = parse_double(fields[2], line_no);
    std::int64_t stamp = 0;
    try {
      std::size_t used = 0;
      stamp = std::stoll(fields[3], &used);
      if (used != fields[3].size() || stamp < 0) throw std::invalid_argument("stamp");
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": bad epoch stamp '" + fields[3] + "'");
    }
    bank.predicted_[id] = BankEntry{pred, stamp};
    bank.ground_truth_[id] = BankEntry{mos, stamp};
  }
  return bank;
}

}  // namespace softsrocc

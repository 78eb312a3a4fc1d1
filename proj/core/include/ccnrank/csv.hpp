#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ccnrank::csv {

using Record = std::vector<std::string>;

/// Incremental RFC-4180 reader: quoted fields may contain commas, doubled
/// quotes and line breaks. Accepts LF or CRLF record terminators.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next record, or nullopt at end of input. Throws ParseError on an
  // unterminated quoted field.
  std::optional<Record> next();
  // 1-based index of the record most recently returned.
  std::size_t record_number() const noexcept { return record_number_; }

 private:
  std::istream& in_;
  std::size_t record_number_ = 0;
};

void write_record(std::ostream& out, std::span<const std::string> fields);

}  // namespace ccnrank::csv

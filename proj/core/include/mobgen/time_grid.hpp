#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace mobgen {

/// A point on the day's 15-minute grid. Slot 0 is 00:00, slot 95 is 23:45.
class TimeOfDay {
public:
  static constexpr int kSlotsPerDay = 96;
  static constexpr int kMinutesPerSlot = 15;
  static constexpr int kLastSlot = kSlotsPerDay - 1;

  constexpr TimeOfDay() = default;

  static TimeOfDay from_slot(int slot);

  /// Nearest grid slot for a minute count past midnight: offsets of up to 7
  /// minutes round down, 8 or more round up; results clamp to slot 95.
  static TimeOfDay from_minutes(int minutes_past_midnight);

  /// Parses "HH:MM" (24-hour clock, 1- or 2-digit hour) and snaps to the grid.
  static TimeOfDay parse(std::string_view hhmm);

  constexpr int slot() const { return slot_; }
  constexpr int minutes() const { return slot_ * kMinutesPerSlot; }
  int hour() const { return minutes() / 60; }
  int minute() const { return minutes() % 60; }

  std::string to_string() const;  // "HH:MM"

  auto operator<=>(const TimeOfDay&) const = default;

private:
  int slot_ = 0;
};

inline TimeOfDay time_from_string(std::string_view hhmm) { return TimeOfDay::parse(hhmm); }

inline TimeOfDay day_end() { return TimeOfDay::from_slot(TimeOfDay::kLastSlot); }

}  // namespace mobgen

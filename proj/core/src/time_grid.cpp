#include "mobgen/time_grid.hpp"

#include <cctype>
#include <cstdio>

#include "mobgen/errors.hpp"

namespace mobgen {

TimeOfDay TimeOfDay::from_slot(int slot) {
  if (slot < 0 || slot >= kSlotsPerDay) {
    throw ParseError("time slot out of range [0, 95]: " + std::to_string(slot));
  }
  TimeOfDay t;
  t.slot_ = slot;
  return t;
}

TimeOfDay TimeOfDay::from_minutes(int minutes_past_midnight) {
  if (minutes_past_midnight < 0 || minutes_past_midnight >= 24 * 60) {
    throw ParseError("minutes out of range [0, 1439]: " + std::to_string(minutes_past_midnight));
  }
  int slot = (minutes_past_midnight + kMinutesPerSlot / 2) / kMinutesPerSlot;
  if (slot > kLastSlot) slot = kLastSlot;  // 23:53..23:59 have no later slot to round to
  return from_slot(slot);
}

TimeOfDay TimeOfDay::parse(std::string_view hhmm) {
  const auto fail = [&](std::string_view what) -> TimeOfDay {
    throw ParseError("malformed time \"" + std::string(hhmm) + "\": " + std::string(what));
  };

  std::size_t colon = hhmm.find(':');
  if (colon == std::string_view::npos) return fail("expected HH:MM");
  std::string_view hh = hhmm.substr(0, colon);
  std::string_view mm = hhmm.substr(colon + 1);
  if (hh.empty() || hh.size() > 2) return fail("bad hour token \"" + std::string(hh) + "\"");
  if (mm.size() != 2) return fail("bad minute token \"" + std::string(mm) + "\"");
  for (char c : hh) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return fail("bad hour token \"" + std::string(hh) + "\"");
  }
  for (char c : mm) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return fail("bad minute token \"" + std::string(mm) + "\"");
  }
  int hour = (hh.size() == 2) ? (hh[0] - '0') * 10 + (hh[1] - '0') : (hh[0] - '0');
  int minute = (mm[0] - '0') * 10 + (mm[1] - '0');
  if (hour > 23) return fail("hour out of range \"" + std::string(hh) + "\"");
  if (minute > 59) return fail("minute out of range \"" + std::string(mm) + "\"");
  return from_minutes(hour * 60 + minute);
}

std::string TimeOfDay::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d:%02d", hour(), minute());
  return buf;
}

}  // namespace mobgen

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fidelity/types.hpp"

namespace fidelity {

/// Column header every drive log carries after its metadata lines.
inline constexpr std::string_view kDriveLogHeader = "t,x,y,heading,speed,yaw_rate,lat_accel,swa";

/// Metadata key under which simulated logs list cone-contact times (seconds,
/// `;`-separated). Its presence means hits were recorded, even when empty.
inline constexpr std::string_view kConeHitEventsKey = "cone_hit_events";

/// Reads the comma-separated drive-log format. Throws ParseError naming the
/// offending line for malformed metadata, unknown enumerations, non-finite
/// numbers or non-increasing time.
DriveLog parse_drive_log(std::istream& in);
DriveLog parse_drive_log(std::string_view text);

/// Writes metadata in canonical order, then the header and one row per sample
/// using shortest round-trip number formatting. Absent optional fields are empty cells.
void write_drive_log(std::ostream& out, const DriveLog& log);
std::string write_drive_log(const DriveLog& log);

std::vector<double> decode_event_times(std::string_view text);
std::string encode_event_times(const std::vector<double>& times);

}  // namespace fidelity

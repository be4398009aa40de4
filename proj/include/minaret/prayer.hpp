#pragma once

#include <chrono>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "minaret/calendar.hpp"
#include "minaret/providers.hpp"
#include "minaret/trace.hpp"

namespace minaret {

struct PrayerError : std::runtime_error {
  explicit PrayerError(const std::string& what) : std::runtime_error(what) {}
};

struct GeoPoint {
  double latitude = 0.0;     // degrees, [-90,90]
  double longitude = 0.0;    // degrees, (-180,180]
  int tz_offset_minutes = 0; // signed offset from UTC
};

constexpr double kKaabaLatitude = 21.4225;
constexpr double kKaabaLongitude = 39.8262;
constexpr double kEarthRadiusKm = 6371.0;

struct QiblaResult {
  double bearing_deg = 0.0;  // [0,360)
  double distance_km = 0.0;
};

/// Great-circle bearing and haversine distance to the Kaaba. Throws
/// PrayerError within 1 km of the Kaaba (bearing undefined).
QiblaResult qibla(const GeoPoint& p);

double haversine_km(double lat1, double lon1, double lat2, double lon2);

/// Isha is either a solar depression angle or a fixed interval after Maghrib.
struct IshaAngle { double degrees; };
struct IshaInterval { int minutes_after_maghrib; };

struct CalcMethod {
  std::string name;
  double fajr_angle;
  std::variant<IshaAngle, IshaInterval> isha_rule;
  int asr_shadow_factor = 1;  // 1 Shafi'i, 2 Hanafi
};

/// The four built-in methods (MWL, Egyptian, UmmAlQura, ISNA).
const std::vector<CalcMethod>& builtin_methods();
std::optional<CalcMethod> find_method(const std::string& name);

/// Minutes after local midnight. When the sun never reaches the required
/// depression (high-latitude summers) fajr and isha fall back to a
/// seventh-of-night rule; entries stay unset only if the sun never sets.
struct PrayerTimetable {
  std::optional<double> fajr, sunrise, dhuhr, asr, maghrib, isha;
};

std::string format_hhmm(double minutes);

/// NOAA-style low-precision solar position. |latitude| must be <= 65.
PrayerTimetable solar_schedule(const GeoPoint& p, const GregorianDate& date,
                               const CalcMethod& m);

/// Solar declination (radians) and equation of time (minutes) for a day of
/// year; exposed for cross-checking.
void solar_parameters(int day_of_year, double& declination_rad, double& eqtime_min);

// ---------------------------------------------------------------------------
// Location resolution
// ---------------------------------------------------------------------------

enum class ResolutionStage { city_db, provider_extraction, geocoder, fallback_default };
std::string to_string(ResolutionStage stage);

struct LocationResolution {
  GeoPoint point;
  std::string display_name;
  ResolutionStage stage = ResolutionStage::fallback_default;
  bool disclaimer = false;
};

struct CityRecord {
  std::string name;                  // canonical, lowercase-matched
  std::vector<std::string> aliases;  // includes Arabic spellings
  GeoPoint point;
};

class CityDatabase {
public:
  CityDatabase();  // embedded seed
  static CityDatabase from_file(const std::string& path);
  std::optional<CityRecord> lookup(const std::string& name) const;
  const std::vector<CityRecord>& records() const { return records_; }

private:
  void parse(const std::string& text);
  std::vector<CityRecord> records_;
};

/// External geocoder behind a rate limit. The stub never resolves.
class Geocoder {
public:
  virtual ~Geocoder() = default;
  virtual std::optional<GeoPoint> geocode(const std::string& place) = 0;
};

class NullGeocoder final : public Geocoder {
public:
  std::optional<GeoPoint> geocode(const std::string&) override { return std::nullopt; }
};

/// Token-bucket wrapper: at most one upstream call per second; calls beyond
/// the budget return nullopt without hitting the upstream.
class RateLimitedGeocoder final : public Geocoder {
public:
  explicit RateLimitedGeocoder(Geocoder* upstream, double per_second = 1.0);
  std::optional<GeoPoint> geocode(const std::string& place) override;

private:
  Geocoder* upstream_;
  double per_second_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
  std::mutex mu_;
};

/// Four-stage pipeline: city DB, provider extraction + re-lookup, geocoder,
/// default coordinates (Makkah) with a disclaimer. Never fails.
LocationResolution resolve_location(const std::string& query, const CityDatabase& cities,
                                    TextGenerator* generator, Geocoder* geocoder,
                                    ExecutionTrace& trace);

}  // namespace minaret

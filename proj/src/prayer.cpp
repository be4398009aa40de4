#include "minaret/prayer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

namespace minaret {
namespace {

constexpr double kPi = std::numbers::pi;
double rad(double deg) { return deg * kPi / 180.0; }
double deg(double r) { return r * 180.0 / kPi; }

std::string lower_ascii(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c += 32;
  return out;
}

}  // namespace

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  double dlat = rad(lat2 - lat1), dlon = rad(lon2 - lon1);
  double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
             std::cos(rad(lat1)) * std::cos(rad(lat2)) *
                 std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

QiblaResult qibla(const GeoPoint& p) {
  double distance = haversine_km(p.latitude, p.longitude, kKaabaLatitude, kKaabaLongitude);
  if (distance < 1.0)
    throw PrayerError("qibla bearing undefined at the Kaaba (distance " +
                      std::to_string(distance) + " km)");
  double phi1 = rad(p.latitude), phi2 = rad(kKaabaLatitude);
  double dlambda = rad(kKaabaLongitude - p.longitude);
  double theta = std::atan2(std::sin(dlambda),
                            std::cos(phi1) * std::tan(phi2) -
                                std::sin(phi1) * std::cos(dlambda));
  double bearing = std::fmod(deg(theta) + 360.0, 360.0);
  return {bearing, distance};
}

const std::vector<CalcMethod>& builtin_methods() {
  static const std::vector<CalcMethod> methods = {
      {"MWL", 18.0, IshaAngle{17.0}, 1},
      {"Egyptian", 19.5, IshaAngle{17.5}, 1},
      {"UmmAlQura", 18.5, IshaInterval{90}, 1},
      {"ISNA", 15.0, IshaAngle{15.0}, 1},
  };
  return methods;
}

std::optional<CalcMethod> find_method(const std::string& name) {
  std::string want = lower_ascii(name);
  for (const auto& m : builtin_methods())
    if (lower_ascii(m.name) == want) return m;
  return std::nullopt;
}

void solar_parameters(int day_of_year, double& declination_rad, double& eqtime_min) {
  // NOAA low-precision series; gamma is the fractional year at solar noon.
  double g = 2.0 * kPi / 365.0 * (day_of_year - 1 + 0.5);
  eqtime_min = 229.18 * (0.000075 + 0.001868 * std::cos(g) - 0.032077 * std::sin(g) -
                         0.014615 * std::cos(2 * g) - 0.040849 * std::sin(2 * g));
  declination_rad = 0.006918 - 0.399912 * std::cos(g) + 0.070257 * std::sin(g) -
                    0.006758 * std::cos(2 * g) + 0.000907 * std::sin(2 * g) -
                    0.002697 * std::cos(3 * g) + 0.00148 * std::sin(3 * g);
}

namespace {

int day_of_year(const GregorianDate& d) {
  return static_cast<int>(gregorian_to_jdn(d) - gregorian_to_jdn({d.year, 1, 1})) + 1;
}

// Minutes from solar noon to the moment the sun reaches altitude `alt_deg`,
// or nullopt if it never does on this day.
std::optional<double> hour_angle_minutes(double lat_deg, double decl_rad, double alt_deg) {
  double phi = rad(lat_deg);
  double cos_omega = (std::sin(rad(alt_deg)) - std::sin(phi) * std::sin(decl_rad)) /
                     (std::cos(phi) * std::cos(decl_rad));
  if (cos_omega < -1.0 || cos_omega > 1.0) return std::nullopt;
  return deg(std::acos(cos_omega)) * 4.0;  // 4 minutes per degree
}

}  // namespace

PrayerTimetable solar_schedule(const GeoPoint& p, const GregorianDate& date,
                               const CalcMethod& m) {
  if (std::abs(p.latitude) > 65.0)
    throw PrayerError("latitude beyond 65 degrees: high-latitude rules not supported");

  double decl, eqtime;
  solar_parameters(day_of_year(date), decl, eqtime);

  // Local clock minutes of solar transit.
  double noon = 720.0 - 4.0 * p.longitude - eqtime + p.tz_offset_minutes;

  PrayerTimetable t;
  t.dhuhr = noon + 1.0;  // one-minute margin after transit, per convention

  auto at_altitude = [&](double alt_deg) { return hour_angle_minutes(p.latitude, decl, alt_deg); };

  if (auto w = at_altitude(-0.833)) {
    t.sunrise = noon - *w;
    t.maghrib = noon + *w;
  }
  // Seventh-of-night fallback for summers at high latitudes, where the sun
  // never reaches the required depression: the night between sunset and the
  // next sunrise is divided into sevenths.
  double night_seventh = 0.0;
  if (t.sunrise && t.maghrib) night_seventh = (1440.0 - (*t.maghrib - *t.sunrise)) / 7.0;

  if (auto w = at_altitude(-m.fajr_angle))
    t.fajr = noon - *w;
  else if (t.sunrise)
    t.fajr = *t.sunrise - night_seventh;

  if (std::holds_alternative<IshaAngle>(m.isha_rule)) {
    if (auto w = at_altitude(-std::get<IshaAngle>(m.isha_rule).degrees))
      t.isha = noon + *w;
    else if (t.maghrib)
      t.isha = *t.maghrib + night_seventh;
  } else if (t.maghrib) {
    t.isha = *t.maghrib + std::get<IshaInterval>(m.isha_rule).minutes_after_maghrib;
  }

  // Asr: shadow length = factor * object height + noon shadow.
  double phi = rad(p.latitude);
  double noon_zenith = std::abs(phi - decl);
  double asr_alt = deg(std::atan(1.0 / (m.asr_shadow_factor + std::tan(noon_zenith))));
  if (auto w = at_altitude(asr_alt)) t.asr = noon + *w;

  return t;
}

std::string format_hhmm(double minutes) {
  int total = static_cast<int>(std::lround(minutes));
  total = ((total % 1440) + 1440) % 1440;
  char buf[6];
  std::snprintf(buf, sizeof buf, "%02d:%02d", total / 60, total % 60);
  return buf;
}

// ---------------------------------------------------------------------------
// Location resolution
// ---------------------------------------------------------------------------

std::string to_string(ResolutionStage stage) {
  switch (stage) {
    case ResolutionStage::city_db: return "city_db";
    case ResolutionStage::provider_extraction: return "provider_extraction";
    case ResolutionStage::geocoder: return "geocoder";
    case ResolutionStage::fallback_default: return "default";
  }
  return "default";
}

namespace {

// name|alias1;alias2|lat|lon|tz_minutes
const char* kSeedCities =
    "makkah|mecca;مكة;مكة المكرمة|21.4225|39.8262|180\n"
    "madinah|medina;المدينة;المدينة المنورة|24.4672|39.6111|180\n"
    "riyadh|الرياض|24.7136|46.6753|180\n"
    "jeddah|جدة|21.5433|39.1728|180\n"
    "doha|الدوحة|25.2854|51.5310|180\n"
    "dubai|دبي|25.2048|55.2708|240\n"
    "abu dhabi|أبوظبي;أبو ظبي|24.4539|54.3773|240\n"
    "kuwait city|kuwait;الكويت|29.3759|47.9774|180\n"
    "manama|المنامة;bahrain|26.2285|50.5860|180\n"
    "muscat|مسقط|23.5880|58.3829|240\n"
    "cairo|القاهرة|30.0444|31.2357|120\n"
    "alexandria|الإسكندرية|31.2001|29.9187|120\n"
    "amman|عمان|31.9454|35.9284|180\n"
    "jerusalem|القدس|31.7683|35.2137|120\n"
    "damascus|دمشق|33.5138|36.2765|180\n"
    "beirut|بيروت|33.8938|35.5018|120\n"
    "baghdad|بغداد|33.3152|44.3661|180\n"
    "istanbul|اسطنبول;إسطنبول|41.0082|28.9784|180\n"
    "london|لندن|51.5074|-0.1278|0\n"
    "paris|باريس|48.8566|2.3522|60\n"
    "berlin|برلين|52.5200|13.4050|60\n"
    "new york|نيويورك|40.7128|-74.0060|-300\n"
    "chicago|شيكاغو|41.8781|-87.6298|-360\n"
    "toronto|تورونتو|43.6532|-79.3832|-300\n"
    "kuala lumpur|كوالالمبور|3.1390|101.6869|480\n"
    "jakarta|جاكرتا|-6.2088|106.8456|420\n"
    "karachi|كراتشي|24.8607|67.0011|300\n"
    "lahore|لاهور|31.5204|74.3587|300\n"
    "dhaka|دكا|23.8103|90.4125|360\n"
    "rabat|الرباط|34.0209|-6.8416|60\n"
    "casablanca|الدار البيضاء|33.5731|-7.5898|60\n"
    "tunis|تونس|36.8065|10.1815|60\n"
    "algiers|الجزائر|36.7538|3.0588|60\n"
    "khartoum|الخرطوم|15.5007|32.5599|120\n"
    "mogadishu|مقديشو|2.0469|45.3182|180\n"
    "sana'a|sanaa;صنعاء|15.3694|44.1910|180\n"
    "tokyo|طوكيو|35.6762|139.6503|540\n"
    "sydney|سيدني|-33.8688|151.2093|600\n";

}  // namespace

CityDatabase::CityDatabase() { parse(kSeedCities); }

CityDatabase CityDatabase::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PrayerError("cannot open city database: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  CityDatabase db;
  db.records_.clear();
  db.parse(ss.str());
  return db;
}

void CityDatabase::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string name, aliases, lat, lon, tz;
    if (!std::getline(ls, name, '|') || !std::getline(ls, aliases, '|') ||
        !std::getline(ls, lat, '|') || !std::getline(ls, lon, '|') ||
        !std::getline(ls, tz))
      continue;
    CityRecord r;
    r.name = name;
    std::istringstream as(aliases);
    std::string a;
    while (std::getline(as, a, ';'))
      if (!a.empty()) r.aliases.push_back(a);
    r.point = {std::stod(lat), std::stod(lon), std::stoi(tz)};
    records_.push_back(std::move(r));
  }
}

std::optional<CityRecord> CityDatabase::lookup(const std::string& name) const {
  std::string want = lower_ascii(name);
  // strip surrounding whitespace
  auto b = want.find_first_not_of(" \t");
  auto e = want.find_last_not_of(" \t");
  if (b == std::string::npos) return std::nullopt;
  want = want.substr(b, e - b + 1);
  for (const auto& r : records_) {
    if (lower_ascii(r.name) == want) return r;
    for (const auto& a : r.aliases)
      if (lower_ascii(a) == want) return r;
  }
  return std::nullopt;
}

RateLimitedGeocoder::RateLimitedGeocoder(Geocoder* upstream, double per_second)
    : upstream_(upstream), per_second_(per_second), tokens_(1.0),
      last_(std::chrono::steady_clock::now()) {}

std::optional<GeoPoint> RateLimitedGeocoder::geocode(const std::string& place) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto now = std::chrono::steady_clock::now();
    tokens_ = std::min(1.0, tokens_ + std::chrono::duration<double>(now - last_).count() * per_second_);
    last_ = now;
    if (tokens_ < 1.0) return std::nullopt;
    tokens_ -= 1.0;
  }
  return upstream_->geocode(place);
}

namespace {

// Pull a plausible place phrase out of a free-text query: the tail after a
// locative marker, or the whole query.
std::string extract_place_phrase(const std::string& query) {
  std::string q = lower_ascii(query);
  for (const char* marker : {" in ", " at ", " for ", " من ", " في "}) {
    auto pos = q.rfind(marker);
    if (pos != std::string::npos) {
      std::string tail = query.substr(pos + std::strlen(marker));
      while (!tail.empty() && (tail.back() == '?' || tail.back() == '.' ||
                               tail.back() == '!' || tail.back() == ' '))
        tail.pop_back();
      if (!tail.empty()) return tail;
    }
  }
  return query;
}

}  // namespace

LocationResolution resolve_location(const std::string& query, const CityDatabase& cities,
                                    TextGenerator* generator, Geocoder* geocoder,
                                    ExecutionTrace& trace) {
  std::string phrase = extract_place_phrase(query);

  // Stage 1: curated DB, exact or alias match on the extracted phrase and on
  // each word of the query.
  auto trim_punct = [](std::string w) {
    const char* punct = ".,;:?!'\"()";
    auto b = w.find_first_not_of(punct);
    auto e = w.find_last_not_of(punct);
    return b == std::string::npos ? std::string() : w.substr(b, e - b + 1);
  };
  auto try_db = [&](const std::string& text) -> std::optional<CityRecord> {
    if (auto r = cities.lookup(text)) return r;
    std::istringstream ws(text);
    std::string w, prev;
    while (ws >> w) {
      w = trim_punct(w);
      if (w.empty()) continue;
      if (auto r = cities.lookup(w)) return r;
      if (!prev.empty())
        if (auto r = cities.lookup(prev + " " + w)) return r;
      prev = w;
    }
    return std::nullopt;
  };
  if (auto r = try_db(phrase)) {
    trace.add("location", "city_db match: " + r->name);
    return {r->point, r->name, ResolutionStage::city_db, false};
  }

  // Stage 2: provider extracts/transliterates a city name, then DB re-lookup.
  if (generator) {
    try {
      std::string name = generator->generate(
          "Extract the city name mentioned in this text, transliterated to its "
          "common English spelling. Reply with the city name only.\nText: " + query,
          0.0, 32);
      if (auto r = cities.lookup(name)) {
        trace.add("location", "provider extraction -> city_db match: " + r->name);
        return {r->point, r->name, ResolutionStage::provider_extraction, false};
      }
    } catch (const std::exception& e) {
      trace.warn(std::string("location extraction provider failed: ") + e.what());
    }
  }

  // Stage 3: rate-limited external geocoder.
  if (geocoder) {
    if (auto p = geocoder->geocode(phrase)) {
      trace.add("location", "geocoder resolved: " + phrase);
      return {*p, phrase, ResolutionStage::geocoder, false};
    }
  }

  // Stage 4: default coordinates with an explicit disclaimer.
  trace.add("location", "unresolved; defaulting to Makkah with disclaimer");
  return {{kKaabaLatitude, kKaabaLongitude, 180},
          "Makkah (default)",
          ResolutionStage::fallback_default,
          true};
}

}  // namespace minaret

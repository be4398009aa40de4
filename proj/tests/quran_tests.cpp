#include <doctest.h>

#include <set>

#include "minaret/quran.hpp"
#include "support.hpp"

using namespace minaret;

namespace {

QuranStore& store() {
  static QuranStore s(data_path("quran.db"));
  return s;
}

}  // namespace

TEST_CASE("corpus shape: 114 surahs, 6236 verses, unique keys") {
  CHECK(store().total_verses() == 6236);
  const auto& catalog = surah_catalog();
  REQUIRE(catalog.size() == 114);
  long long sum = 0;
  for (int s = 1; s <= 114; ++s) {
    int n = store().verse_count(s);
    CHECK(n == catalog[s - 1].verse_count);
    sum += n;
  }
  CHECK(sum == 6236);
  // uniqueness: the count of distinct (surah, ayah) pairs equals the total
  auto rows = store().execute(validate_sql(
      "SELECT COUNT(DISTINCT Surah || ':' || Ayah) FROM Quran"));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][0] == "6236");
}

TEST_CASE("well-known verse counts") {
  CHECK(store().verse_count(1) == 7);
  CHECK(store().verse_count(2) == 286);
  CHECK(store().verse_count(108) == 3);
  CHECK(store().verse_count(112) == 4);
}

TEST_CASE("all 114 canonical names resolve to themselves") {
  for (int s = 1; s <= 114; ++s) {
    const auto& info = surah_catalog()[s - 1];
    CAPTURE(info.transliteration);
    CHECK(resolve_surah(info.transliteration) == s);
    CHECK(resolve_surah(info.arabic_name) == s);
    CHECK(resolve_surah("Surah " + info.transliteration) == s);
  }
}

TEST_CASE("fuzzy resolution and suggestions") {
  TrigramEmbedder emb;
  CHECK(resolve_surah("Bakara", &emb) == 2);
  CHECK(resolve_surah("fatiha", &emb) == 1);
  CHECK(resolve_surah("ikhlas", &emb) == 112);
  try {
    resolve_surah("zzzzqqqq", &emb);
    FAIL("expected SurahUnresolved");
  } catch (const SurahUnresolved& e) {
    CHECK(e.suggestions.size() == 3);
  }
}

TEST_CASE("reference parsing covers the documented formats") {
  auto r1 = parse_reference("2:275");
  CHECK(r1.surah == 2);
  REQUIRE(r1.ayah_range.has_value());
  CHECK(r1.ayah_range->first == 275);
  CHECK(r1.ayah_range->second == 275);

  auto r2 = parse_reference("2:1-5");
  CHECK(r2.ayah_range == std::make_pair(1, 5));

  auto r3 = parse_reference("Al-Baqarah:255");
  CHECK(r3.surah == 2);
  CHECK(r3.ayah_range->first == 255);

  auto r4 = parse_reference("Surah 2 Verse 275");
  CHECK(r4.surah == 2);
  CHECK(r4.ayah_range->first == 275);

  auto r5 = parse_reference("سورة البقرة آية ٢٥٥");
  CHECK(r5.surah == 2);
  CHECK(r5.ayah_range->first == 255);

  auto bare = parse_reference("Write Surah Al-Fatiha");
  CHECK(bare.surah == 1);
  CHECK(!bare.ayah_range.has_value());

  CHECK_THROWS_AS(parse_reference("@@@@"), QuranError);
}

TEST_CASE("fetch round-trips to the citation URL") {
  auto [verses, url] = store().fetch_verses({2, 275, 275});
  REQUIRE(verses.size() == 1);
  CHECK(url == "https://quran.com/2/275");
  CHECK(verses[0].surah == 2);
  CHECK(verses[0].ayah == 275);
  CHECK(verses[0].juz == 3);
  CHECK(!verses[0].ayah_text.empty());
  CHECK(!verses[0].translation.empty());

  auto [range, range_url] = store().fetch_verses({2, 1, 5});
  CHECK(range.size() == 5);
  CHECK(range_url == "https://quran.com/2/1");  // ranges keyed by the start

  CHECK_THROWS_AS(store().fetch_verses({115, 1, 1}), QuranError);
  CHECK_THROWS_AS(store().fetch_verses({1, 8, 8}), QuranError);
}

TEST_CASE("fetched bytes equal the ingested bytes") {
  // The simple text must be exactly the stripped form of the stored text,
  // and fetching twice returns identical bytes.
  auto [a, ua] = store().fetch_verses({36, 1, 10});
  auto [b, ub] = store().fetch_verses({36, 1, 10});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].ayah_text == b[i].ayah_text);
    CHECK(a[i].simple_text == strip_diacritics(a[i].ayah_text));
  }
  CHECK(ua == ub);
}

TEST_CASE("SQL validator rejects an attack suite") {
  const char* attacks[] = {
      "INSERT INTO Quran VALUES (1,1,1,'x','x','x',1,'Meccan')",
      "UPDATE Quran SET Translation = 'tampered'",
      "DELETE FROM Quran",
      "DROP TABLE Quran",
      "CREATE TABLE evil (x INT)",
      "ALTER TABLE Quran ADD COLUMN evil TEXT",
      "ATTACH DATABASE '/tmp/evil.db' AS evil",
      "DETACH DATABASE evil",
      "PRAGMA writable_schema = 1",
      "REPLACE INTO Quran VALUES (1,1,1,'x','x','x',1,'Meccan')",
      "VACUUM",
      "REINDEX",
      "BEGIN TRANSACTION",
      "COMMIT",
      "SELECT * FROM Quran; DROP TABLE Quran",
      "SELECT * FROM sqlite_master",
      "SELECT * FROM Users",
      "SELECT * FROM Quran JOIN Users ON 1=1",
      "SELECT load_extension('evil')",
      "",
  };
  int rejected = 0;
  for (const char* sql : attacks) {
    CAPTURE(sql);
    CHECK_THROWS_AS(validate_sql(sql), SqlRejected);
    ++rejected;
  }
  CHECK(rejected == 20);
}

TEST_CASE("SQL validator accepts read-only single selects") {
  SqlPlan p = validate_sql("SELECT COUNT(*) FROM Quran WHERE Surah = 2");
  CHECK(p.read_only);
  REQUIRE(p.tables.size() == 1);
  CHECK(p.tables[0] == "Quran");
  CHECK_NOTHROW(validate_sql("SELECT Surah, COUNT(*) FROM Quran GROUP BY Surah"));
  CHECK_NOTHROW(validate_sql("SELECT * FROM Quran WHERE Surah = 2;"));  // one trailing ;
}

TEST_CASE("denotational equivalence is reflexive and symmetric") {
  const char* fixtures[] = {
      "SELECT COUNT(*) FROM Quran",
      "SELECT COUNT(*) FROM Quran WHERE Surah = 2",
      "SELECT DISTINCT Revelation FROM Quran WHERE Surah = 2",
      "SELECT Surah FROM Quran GROUP BY Surah ORDER BY COUNT(*) DESC LIMIT 1",
      "SELECT COUNT(*) FROM Quran WHERE Juz = 30",
      "SELECT COUNT(DISTINCT Surah) FROM Quran WHERE Revelation = 'Meccan'",
      "SELECT Ayah FROM Quran WHERE Surah = 112",
      "SELECT MAX(Ayah) FROM Quran WHERE Surah = 2",
      "SELECT Surah, COUNT(*) FROM Quran GROUP BY Surah",
      "SELECT Translation FROM Quran WHERE Surah = 1 AND Ayah = 1",
  };
  for (const char* a : fixtures) {
    SqlPlan pa = validate_sql(a);
    CHECK(denotational_match(pa, pa, store()));  // reflexive
    for (const char* b : fixtures) {
      SqlPlan pb = validate_sql(b);
      CHECK(denotational_match(pa, pb, store()) == denotational_match(pb, pa, store()));
    }
  }
  // semantically equal, syntactically different
  CHECK(denotational_match(validate_sql("SELECT COUNT(ID) FROM Quran WHERE Surah = 1"),
                           validate_sql("SELECT COUNT(*) FROM Quran WHERE Surah = 1"),
                           store()));
  // row order must not matter
  CHECK(denotational_match(validate_sql("SELECT Ayah FROM Quran WHERE Surah = 112 ORDER BY Ayah DESC"),
                           validate_sql("SELECT Ayah FROM Quran WHERE Surah = 112 ORDER BY Ayah ASC"),
                           store()));
  // different answers differ
  CHECK(!denotational_match(validate_sql("SELECT COUNT(*) FROM Quran WHERE Surah = 1"),
                            validate_sql("SELECT COUNT(*) FROM Quran WHERE Surah = 2"),
                            store()));
}

TEST_CASE("template grammar answers the stock statistics questions") {
  TrigramEmbedder emb;
  ExecutionTrace trace;
  auto run1 = [&](const std::string& q) {
    SqlPlan p = nl_to_sql(q, nullptr, &emb, trace);
    auto rows = store().execute(p);
    REQUIRE(!rows.empty());
    return rows[0][0];
  };
  CHECK(run1("How many verses in Surah Al-Baqarah?") == "286");
  CHECK(run1("How many verses are in the whole Quran?") == "6236");
  CHECK(run1("Which surah has the most verses?") == "2");
  CHECK(run1("Is Al-Baqarah Makki or Madani?") == "Medinan");
}

TEST_CASE("subtype classification falls back deterministically") {
  TrigramEmbedder emb;
  StubTextGenerator gen;
  ExecutionTrace trace;
  CHECK(classify_subtype("Write verse 2:255", &gen, &emb, trace) == QuranSubtype::specific_verse);
  CHECK(classify_subtype("Write Surah Al-Fatiha in full", &gen, &emb, trace) ==
        QuranSubtype::full_surah);
  CHECK(classify_subtype("How many verses are in the Quran?", &gen, &emb, trace) ==
        QuranSubtype::statistics);
  CHECK(classify_subtype("What is the meaning of Ayat al-Kursi?", &gen, &emb, trace) ==
        QuranSubtype::interpretation);
}

TEST_CASE("diacritic stripping") {
  // fatha+shadda and similar marks disappear; base letters survive.
  std::string uthmani = "\xD8\xA8\xD9\x90\xD8\xB3\xD9\x92\xD9\x85\xD9\x90";  // بِسْمِ
  std::string stripped = strip_diacritics(uthmani);
  CHECK(stripped == "\xD8\xA8\xD8\xB3\xD9\x85");  // بسم
  CHECK(strip_diacritics("plain ascii") == "plain ascii");
}

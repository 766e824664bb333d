#include "synth_draft.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <string_view>

namespace cuesplit::synth {

namespace {

using Strings = std::vector<std::string>;

const Strings kAgreementTitles = {
    "MASTER SERVICES AGREEMENT", "LICENSE AGREEMENT",
    "DISTRIBUTION AGREEMENT",    "SUPPLY AGREEMENT",
    "CONSULTING AGREEMENT",      "DEVELOPMENT AGREEMENT",
    "MARKETING AFFILIATE AGREEMENT", "JOINT VENTURE AGREEMENT",
    "OUTSOURCING AGREEMENT",     "RESELLER AGREEMENT",
    "SPONSORSHIP AGREEMENT",     "HOSTING AGREEMENT",
    "MANUFACTURING AGREEMENT",   "TRANSPORTATION SERVICES AGREEMENT"};

const Strings kCompanies = {
    "Acme Holdings, Inc.",       "Borealis Systems LLC",
    "Cedar Point Logistics Corp.", "Dunmore Pharmaceuticals, Inc.",
    "Equinox Media Group LLC",   "Fairhaven Energy Partners LP",
    "Granite Peak Software, Inc.", "Harborview Medical Devices Corp.",
    "Ironwood Capital LLC",      "Juniper Analytics, Inc.",
    "Keystone Foods Corporation", "Lakeshore Telecom LLC",
    "Meridian Biotech, Inc.",    "Northgate Retail Corp.",
    "Oakmont Industrial Supply LLC", "Pinnacle Health Networks, Inc.",
    "Quarry Hill Minerals Corp.", "Redwood Data Services LLC",
    "Sterling Aerospace, Inc.",  "Tidewater Shipping Company",
    "Union Square Ventures LLC", "Vantage Robotics Corp.",
    "Westbrook Consumer Brands, Inc.", "Yellowstone Outdoor Gear LLC"};

const Strings kPartyRoles = {"Company",  "Provider",   "Customer",
                             "Supplier", "Licensee",   "Licensor",
                             "Distributor", "Client",  "Consultant",
                             "Developer", "Reseller",  "Manufacturer"};

const Strings kJurisdictions = {
    "State of Ohio",         "State of New York",      "State of California",
    "State of Delaware",     "State of Texas",         "State of Massachusetts",
    "Commonwealth of Pennsylvania", "Commonwealth of Virginia",
    "Province of Ontario",   "State of Louisiana",     "State of Washington",
    "State of Illinois",     "State of New Jersey",    "State of Georgia",
    "State of Florida",      "State of Colorado",      "State of Nevada",
    "State of North Carolina", "Province of British Columbia",
    "State of Minnesota"};

const Strings kCounties = {"Cook",   "Franklin", "New York", "Santa Clara",
                           "Harris", "Suffolk",  "King",     "Fulton",
                           "Denver", "Hennepin", "Orange",   "Wake"};

const Strings kMonths = {"January", "February", "March",     "April",
                         "May",     "June",     "July",      "August",
                         "September", "October", "November", "December"};

const Strings kNumberWords = {"one", "two",   "three", "four", "five",
                              "six", "seven", "eight", "nine", "ten"};

const Strings kNoticeDays = {"fifteen (15)", "thirty (30)", "sixty (60)",
                             "ninety (90)", "forty-five (45)"};

const Strings kHeadingGoverning = {"Governing Law", "Choice of Law",
                                   "Applicable Law",
                                   "Governing Law and Jurisdiction"};
const Strings kHeadingTerm = {"Term", "Term of Agreement", "Duration"};
const Strings kHeadingTermination = {"Termination", "Termination Rights",
                                     "Early Termination"};
const Strings kHeadingAssignment = {"Assignment", "Successors and Assigns",
                                    "Assignment and Delegation"};

// Generic clause vocabulary. Nothing here mentions termination, assignment
// or choice of law so the attribute clauses stay the only evidence.
const Strings kSubjects = {"Each Party",        "{A}",
                           "{B}",               "The Parties",
                           "The receiving Party", "The disclosing Party",
                           "Such Party",        "Neither Party"};

const Strings kVerbs = {"shall use commercially reasonable efforts to",
                        "shall promptly", "agrees to", "will",
                        "shall at all times", "may, at its sole discretion,",
                        "shall", "undertakes to"};

const Strings kNegVerbs = {"shall not", "will not", "agrees not to"};

const Strings kActions = {
    "maintain accurate records of all Services performed",
    "provide written reports on a quarterly basis",
    "cooperate in good faith with the other Party",
    "deliver the Deliverables in accordance with the Specifications",
    "protect the Confidential Information of the other Party",
    "comply with the reasonable instructions of the other Party",
    "pay all undisputed invoices",
    "keep the Products free of any liens and encumbrances",
    "notify the other Party of any material change in its operations",
    "maintain insurance coverage with reputable carriers",
    "review and approve all marketing materials",
    "make available qualified personnel",
    "implement appropriate technical and organizational security measures",
    "perform the Services in a professional and workmanlike manner",
    "reimburse reasonable out-of-pocket expenses",
    "provide reasonable assistance and information",
    "retain all supporting documentation for a period of three years",
    "disclose any actual or potential conflict of interest",
    "designate a project manager responsible for day-to-day coordination",
    "permit reasonable inspection of its facilities",
    "correct any nonconforming Deliverables at no additional charge",
    "furnish the forecasts described in Exhibit B",
    "use the Marks only in the form approved in writing",
    "treat all pricing information as Confidential Information"};

const Strings kNegActions = {
    "disclose the terms of this Agreement to any third party",
    "use the Confidential Information for any purpose other than performance hereunder",
    "solicit for employment any employee of the other Party",
    "reverse engineer, decompile or disassemble the Software",
    "make any public announcement regarding this Agreement",
    "incur any obligation on behalf of the other Party",
    "alter or remove any proprietary notices"};

const Strings kModifiers = {
    "during the Term", "within thirty (30) days after receipt of an invoice",
    "in accordance with Applicable Law", "as set forth in Exhibit A",
    "to the extent reasonably practicable", "at its own cost and expense",
    "upon reasonable prior notice", "consistent with industry standards",
    "subject to the terms and conditions of this Agreement",
    "for the benefit of the other Party", "without undue delay",
    "in a timely manner", "as reasonably requested from time to time", "", ""};

const Strings kConditions = {
    "any Deliverable fails to conform to the Specifications",
    "a dispute arises regarding any invoice",
    "the Services are delayed for reasons beyond its control",
    "any governmental authority requests information",
    "a security incident affects the Customer Data",
    "the forecast exceeds the agreed capacity",
    "any third party asserts a claim of infringement",
    "the Parties cannot agree on a change order"};

const Strings kDefinedTerms = {
    "Affiliate", "Confidential Information", "Deliverables", "Services",
    "Specifications", "Intellectual Property Rights", "Purchase Order",
    "Business Day", "Customer Data", "Territory", "Products", "Fees",
    "Losses", "Marks", "Documentation", "Change Order"};

const Strings kDefinitions = {
    "any entity that directly or indirectly controls, is controlled by, or is under common control with a Party",
    "all non-public information disclosed by one Party to the other in any form",
    "the work product described in each Statement of Work",
    "the services described in Exhibit A and any related support",
    "the technical and functional requirements set out in the applicable Statement of Work",
    "all patents, copyrights, trademarks, trade secrets and other proprietary rights",
    "a written order for Products issued under this Agreement",
    "any day other than a Saturday, Sunday or public holiday",
    "all data submitted to the Services by or on behalf of Customer",
    "the geographic area listed in Schedule 1",
    "the goods listed in the price list attached as Schedule A",
    "the amounts payable for the Services as set out in Schedule A",
    "all losses, damages, costs and reasonable attorneys' fees",
    "the trademarks and logos identified in Exhibit C",
    "the user manuals and technical materials made available by Provider",
    "a written amendment to a Statement of Work signed by both Parties"};

struct Topic {
  std::string title;
  Strings sentences;
};

const std::vector<Topic> kFillerTopics = {
    {"Services",
     {"{A} shall perform the Services described in each Statement of Work executed by the Parties.",
      "Each Statement of Work shall describe the scope, schedule and fees applicable to the Services.",
      "In the event of a conflict, the terms of this Agreement shall prevail over any Statement of Work."}},
    {"Payment Terms",
     {"{B} shall pay all Fees within thirty (30) days after the date of each invoice.",
      "Late payments shall bear interest at the lesser of one percent per month or the maximum rate permitted.",
      "All amounts are stated and payable in United States dollars."}},
    {"Confidentiality",
     {"The receiving Party shall hold the Confidential Information in strict confidence.",
      "Confidential Information does not include information that is or becomes publicly available through no fault of the receiving Party.",
      "The receiving Party may disclose Confidential Information to the extent required by court order, provided that it gives prompt notice."}},
    {"Intellectual Property",
     {"Each Party retains all right, title and interest in and to its pre-existing Intellectual Property Rights.",
      "{A} hereby grants to {B} a non-exclusive license to use the Deliverables for its internal business purposes.",
      "Nothing in this Agreement shall be construed as granting any license by implication or estoppel."}},
    {"Warranties",
     {"{A} warrants that the Services will be performed with reasonable skill and care.",
      "EXCEPT AS EXPRESSLY SET FORTH HEREIN, NEITHER PARTY MAKES ANY OTHER WARRANTY, EXPRESS OR IMPLIED.",
      "The warranty set forth above shall not apply to any defect caused by misuse or unauthorized modification."}},
    {"Indemnification",
     {"{A} shall defend, indemnify and hold harmless {B} from and against all Losses arising from any third-party claim.",
      "The indemnified Party shall give prompt written notice of any claim for which indemnity is sought.",
      "The indemnifying Party shall have sole control of the defense and settlement of any such claim."}},
    {"Limitation of Liability",
     {"IN NO EVENT SHALL EITHER PARTY BE LIABLE FOR ANY INDIRECT, INCIDENTAL OR CONSEQUENTIAL DAMAGES.",
      "Each Party's aggregate liability shall not exceed the Fees paid in the twelve months preceding the claim.",
      "The foregoing limitations shall not apply to breaches of confidentiality obligations."}},
    {"Insurance",
     {"{A} shall maintain commercial general liability insurance with limits of not less than two million dollars per occurrence.",
      "Certificates of insurance shall be furnished upon request.",
      "Each policy shall name {B} as an additional insured."}},
    {"Force Majeure",
     {"Neither Party shall be liable for any delay caused by events beyond its reasonable control.",
      "The affected Party shall notify the other Party promptly and use reasonable efforts to resume performance.",
      "Such events include acts of God, fire, flood, war, epidemic and governmental action."}},
    {"Independent Contractors",
     {"The relationship of the Parties is that of independent contractors.",
      "Nothing herein shall be deemed to create a partnership, joint venture or agency relationship.",
      "Neither Party has authority to bind the other Party to any obligation."}},
    {"Audit Rights",
     {"{B} may audit the records of {A} relating to the Fees once in any calendar year.",
      "Any audit shall be conducted during normal business hours upon ten (10) Business Days notice.",
      "If an audit reveals an overcharge, {A} shall promptly refund the excess amount."}},
    {"Non-Solicitation",
     {"During the Term and for one year thereafter, neither Party shall solicit employees of the other Party.",
      "General advertisements not targeted at such employees shall not violate this Section."}},
    {"Publicity",
     {"Neither Party shall use the name or Marks of the other Party without prior written approval.",
      "The Parties may issue a joint press release in a form mutually agreed."}},
    {"Severability",
     {"If any provision of this Agreement is held invalid, the remaining provisions shall continue in full force.",
      "The invalid provision shall be replaced by a valid provision that most closely reflects the original intent."}},
    {"Waiver",
     {"No waiver of any provision shall be effective unless in writing and signed by the waiving Party.",
      "No failure or delay in exercising any right shall operate as a waiver thereof."}},
    {"Entire Agreement",
     {"This Agreement constitutes the entire agreement between the Parties with respect to its subject matter.",
      "It supersedes all prior negotiations, representations and understandings, whether written or oral."}},
    {"Counterparts",
     {"This Agreement may be executed in counterparts, each of which shall be deemed an original.",
      "Signatures delivered by electronic transmission shall be deemed original signatures."}},
    {"Amendments",
     {"This Agreement may be amended only by a written instrument signed by authorized representatives of both Parties."}},
    {"Dispute Resolution",
     {"The Parties shall attempt in good faith to resolve any dispute through negotiation between senior executives.",
      "If the dispute is not resolved within thirty (30) days, either Party may pursue any available remedy.",
      "Each Party shall bear its own costs in connection with such negotiations."}},
    {"Taxes",
     {"{B} shall be responsible for all sales, use and value added taxes arising from the Services.",
      "Each Party shall be responsible for taxes based on its own net income."}},
    {"Data Protection",
     {"{A} shall process Customer Data only on documented instructions from {B}.",
      "{A} shall notify {B} without undue delay after becoming aware of a security incident.",
      "Upon request, {A} shall delete or return all Customer Data."}},
    {"Subcontracting",
     {"{A} may engage subcontractors to perform portions of the Services with prior notice to {B}.",
      "{A} shall remain responsible for the acts and omissions of its subcontractors."}},
    {"Survival",
     {"The provisions of this Agreement which by their nature should survive shall survive any expiration of this Agreement."}},
    {"Export Control",
     {"Each Party shall comply with all export control regulations applicable to the Products.",
      "{B} shall not export the Software to any embargoed country."}},
    {"Equitable Relief",
     {"Each Party acknowledges that a breach of its confidentiality obligations may cause irreparable harm.",
      "The non-breaching Party shall be entitled to seek injunctive relief in addition to any other remedy."}},
    {"Records",
     {"{A} shall maintain complete and accurate records relating to the Services.",
      "Such records shall be retained for at least three years following completion of the Services."}},
    {"Delivery",
     {"{A} shall deliver the Products to the facility designated in the applicable Purchase Order.",
      "Title and risk of loss shall pass upon delivery."}},
    {"Acceptance",
     {"{B} shall have ten (10) Business Days to inspect each Deliverable.",
      "If {B} does not reject a Deliverable within such period, the Deliverable shall be deemed accepted."}},
    {"Support and Maintenance",
     {"{A} shall provide telephone and email support during normal business hours.",
      "Critical issues shall receive a response within four hours."}},
    {"Notices",
     {"All notices under this Agreement shall be in writing and delivered by hand, courier or certified mail.",
      "Notices shall be deemed given upon receipt at the address set forth on the signature page."}}};

const Strings kFirstNames = {"John", "Mary", "Robert", "Linda", "David",
                             "Susan", "Michael", "Karen", "James", "Patricia"};
const Strings kLastNames = {"Smith", "Johnson", "Williams", "Brown", "Jones",
                            "Miller", "Davis", "Garcia", "Wilson", "Moore"};
const Strings kOfficerTitles = {"Chief Executive Officer", "President",
                                "Chief Financial Officer", "General Counsel",
                                "Vice President", "Managing Director"};

const Strings kFeeItems = {"Implementation Services", "Annual License Fee",
                           "Support Services",        "Training Sessions",
                           "Hosting Fee",             "Custom Development",
                           "Onsite Consulting",       "Data Migration",
                           "Hardware Units",          "Maintenance Renewal"};

std::string replace_all(std::string s, std::string_view from,
                        std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::string roman(int n) {
  static const std::pair<int, const char*> table[] = {
      {10, "x"}, {9, "ix"}, {5, "v"}, {4, "iv"}, {1, "i"}};
  std::string out;
  for (const auto& [v, s] : table) {
    while (n >= v) {
      out += s;
      n -= v;
    }
  }
  return out;
}

std::string letter(int n) { return std::string(1, static_cast<char>('a' + n)); }

class Writer {
 public:
  Writer(Rng& rng, const DraftParams& params) : rng_(rng), params_(params) {
    numbering_ = static_cast<int>(rng_.below(4));
    heading_bold_ = rng_.chance(0.75);
    heading_underline_ = rng_.chance(0.45);
    if (!heading_bold_ && !heading_underline_) heading_underline_ = true;
    sub_heading_prob_ = rng_.uniform(0.0, 0.6);
    sub_indent_ = rng_.chance(0.5) ? 18.0 : 36.0;
  }

  Draft build() {
    std::size_t ia = rng_.below(kCompanies.size());
    std::size_t ib = rng_.below(kCompanies.size() - 1);
    if (ib >= ia) ++ib;
    draft_.company_a = kCompanies[ia];
    draft_.company_b = kCompanies[ib];
    std::size_t ra = rng_.below(kPartyRoles.size());
    std::size_t rb = rng_.below(kPartyRoles.size() - 1);
    if (rb >= ra) ++rb;
    role_a_ = kPartyRoles[ra];
    role_b_ = kPartyRoles[rb];
    draft_.title = rng_.pick(kAgreementTitles);
    governing_ = rng_.pick(kJurisdictions);
    draft_.termination_for_convenience = rng_.chance(0.4);
    draft_.anti_assignment = rng_.chance(0.6);

    write_front_matter();

    // Attribute-bearing clauses are placed at random points of the body.
    enum Kind { kTerm, kTermination, kCombo, kAssignment, kGoverning,
                kRepresentations, kCompliance, kDisputes, kRelated };
    std::vector<std::pair<double, Kind>> required;
    if (rng_.chance(0.3)) {
      required.push_back({rng_.uniform(0.05, 0.5), kCombo});
    } else {
      required.push_back({rng_.uniform(0.02, 0.3), kTerm});
      required.push_back({rng_.uniform(0.3, 0.8), kTermination});
    }
    required.push_back({rng_.uniform(0.2, 0.95), kAssignment});
    required.push_back({rng_.uniform(0.5, 0.97), kGoverning});
    required.push_back({rng_.uniform(0.05, 0.6), kRepresentations});
    if (rng_.chance(0.6)) required.push_back({rng_.uniform(0.1, 0.9), kCompliance});
    if (rng_.chance(0.5)) required.push_back({rng_.uniform(0.05, 0.95), kDisputes});
    if (rng_.chance(0.5)) required.push_back({rng_.uniform(0.05, 0.95), kRelated});
    std::sort(required.begin(), required.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    const std::size_t tail_reserve = 180;
    const std::size_t body_target =
        params_.target_words > tail_reserve + 400
            ? params_.target_words - tail_reserve
            : 400;
    if (rng_.chance(0.6)) write_definitions();
    std::size_t next_required = 0;
    std::vector<std::size_t> topic_order(kFillerTopics.size());
    for (std::size_t i = 0; i < topic_order.size(); ++i) topic_order[i] = i;
    rng_.shuffle(topic_order);
    std::size_t filler_cursor = 0;
    while (draft_.word_count < body_target || next_required < required.size()) {
      if (next_required < required.size() &&
          (draft_.word_count >=
               static_cast<std::size_t>(required[next_required].first *
                                        static_cast<double>(body_target)) ||
           draft_.word_count >= body_target)) {
        switch (required[next_required].second) {
          case kTerm: write_term_clause(false); break;
          case kTermination: write_termination_clause(); break;
          case kCombo: write_combo_clause(); break;
          case kAssignment: write_assignment_clause(); break;
          case kGoverning: write_governing_clause(); break;
          case kRepresentations: write_representations_clause(); break;
          case kCompliance: write_compliance_clause(); break;
          case kDisputes: write_disputes_clause(); break;
          case kRelated: write_related_agreement_clause(); break;
        }
        ++next_required;
        continue;
      }
      const Topic& topic = kFillerTopics[topic_order[filler_cursor % topic_order.size()]];
      ++filler_cursor;
      write_filler_clause(topic);
    }
    write_signature_block();
    if (rng_.chance(0.8)) write_schedule();
    return std::move(draft_);
  }

 private:
  // --- text helpers -------------------------------------------------------

  std::string fill(std::string s) {
    s = replace_all(std::move(s), "{A}", role_a_);
    s = replace_all(std::move(s), "{B}", role_b_);
    return s;
  }

  std::string date() {
    return kMonths[rng_.below(12)] + " " + std::to_string(rng_.between(1, 28)) +
           ", " + std::to_string(rng_.between(2015, 2032));
  }

  std::string duration() {
    std::size_t n = rng_.between(1, 10);
    const bool months = rng_.chance(0.25);
    if (months) n = rng_.pick(std::vector<std::size_t>{6, 12, 18, 24, 36});
    std::string word = n <= 10 ? kNumberWords[n - 1]
                       : n == 12 ? "twelve"
                       : n == 18 ? "eighteen"
                       : n == 24 ? "twenty-four"
                                 : "thirty-six";
    std::string unit = months ? "months" : (n == 1 ? "year" : "years");
    return word + " (" + std::to_string(n) + ") " + unit;
  }

  std::string other_jurisdiction() {
    for (;;) {
      const std::string& j = rng_.pick(kJurisdictions);
      if (j != governing_) return j;
    }
  }

  std::string state_name(const std::string& jurisdiction) {
    return jurisdiction.substr(jurisdiction.find(" of ") + 4);
  }

  std::string generic_sentence() {
    switch (rng_.below(5)) {
      case 0:
      case 1: {
        std::string m = rng_.pick(kModifiers);
        return fill(rng_.pick(kSubjects) + " " + rng_.pick(kVerbs) + " " +
                    rng_.pick(kActions) + (m.empty() ? "" : " " + m) + ".");
      }
      case 2:
        return fill("In the event that " + rng_.pick(kConditions) + ", " +
                    rng_.pick(kSubjects) + " " + rng_.pick(kVerbs) + " " +
                    rng_.pick(kActions) + ".");
      case 3:
        return fill("Notwithstanding the foregoing, " + rng_.pick(kSubjects) +
                    " " + rng_.pick(kNegVerbs) + " " + rng_.pick(kNegActions) +
                    ".");
      default: {
        std::string m = rng_.pick(kModifiers);
        return fill(rng_.pick(kSubjects) + " " + rng_.pick(kNegVerbs) + " " +
                    rng_.pick(kNegActions) + (m.empty() ? "" : " " + m) + ".");
      }
    }
  }

  // Splits text into words. "[[" / "]]" mark an answer span.
  std::vector<Word> words_of(const std::string& text,
                             std::optional<std::pair<std::size_t, std::size_t>>* span =
                                 nullptr,
                             std::size_t offset = 0) {
    std::vector<Word> out;
    std::istringstream in(text);
    std::string w;
    std::size_t begin = 0;
    while (in >> w) {
      if (w.rfind("[[", 0) == 0) {
        w.erase(0, 2);
        begin = offset + out.size();
      }
      auto close = w.find("]]");
      if (close != std::string::npos) {
        w.erase(close, 2);
        if (span) *span = std::make_pair(begin, offset + out.size());
      }
      out.push_back({w});
    }
    return out;
  }

  void count(const Para& p) {
    draft_.word_count += p.words.size();
    for (const auto& row : p.rows) {
      for (const auto& cell : row) draft_.word_count += cell.size();
    }
  }

  void push(Para p) {
    count(p);
    draft_.paras.push_back(std::move(p));
  }

  void style_heading(std::vector<Word>& words, std::size_t n) {
    for (std::size_t i = 0; i < n && i < words.size(); ++i) {
      words[i].bold = heading_bold_;
      words[i].underline = heading_underline_;
    }
  }

  std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  }

  // --- structure ------------------------------------------------------------

  struct Sub {
    std::string heading;           // optional inline heading
    std::vector<std::string> sentences;
    std::vector<Sub> children;
  };

  struct Clause {
    std::string title;
    std::vector<std::string> sentences;
    std::vector<Sub> subs;
  };

  // Emits a clause and its sub-clauses; returns the section groups used.
  std::vector<int> emit_clause(const Clause& clause) {
    ++clause_number_;
    std::vector<int> groups;
    const int group = next_group_++;
    groups.push_back(group);
    const std::string num = std::to_string(clause_number_);
    const std::string body = join(clause.sentences);

    auto body_para = [&](std::vector<Word> words) {
      Para p;
      p.role = Role::clause;
      p.group = group;
      p.words = std::move(words);
      p.kind = BlockKind::paragraph;
      return p;
    };

    if (numbering_ == 0 || numbering_ == 1) {
      std::string lead = numbering_ == 0 ? num + "." : "Section " + num + ".";
      std::vector<Word> words = words_of(lead);
      const std::size_t lead_n = words.size();
      auto title = words_of(clause.title + ".");
      words.insert(words.end(), title.begin(), title.end());
      style_heading(words, lead_n + title.size());
      std::optional<std::pair<std::size_t, std::size_t>> span;
      auto rest = words_of(body, &span, words.size());
      words.insert(words.end(), rest.begin(), rest.end());
      Para p = body_para(std::move(words));
      attach_answer(p, span);
      push(std::move(p));
    } else if (numbering_ == 2) {
      Para a = body_para(words_of("ARTICLE " + num));
      style_heading(a.words, a.words.size());
      a.align = Align::center;
      a.space_before = 1.2;
      push(std::move(a));
      Para t = body_para(words_of(upper(clause.title)));
      style_heading(t.words, t.words.size());
      t.align = Align::center;
      t.space_before = 0.2;
      push(std::move(t));
      std::optional<std::pair<std::size_t, std::size_t>> span;
      Para b = body_para(words_of(body, &span));
      attach_answer(b, span);
      push(std::move(b));
    } else {
      Para h = body_para(words_of(num + ". " + upper(clause.title)));
      style_heading(h.words, h.words.size());
      h.space_before = 1.0;
      push(std::move(h));
      std::optional<std::pair<std::size_t, std::size_t>> span;
      Para b = body_para(words_of(body, &span));
      b.space_before = 0.3;
      attach_answer(b, span);
      push(std::move(b));
    }

    for (std::size_t i = 0; i < clause.subs.size(); ++i) {
      emit_sub(clause.subs[i], static_cast<int>(i), 1, groups);
    }
    return groups;
  }

  std::string sub_label(int index, int depth) {
    const int style = (numbering_ == 1 || numbering_ == 2) ? 1 : 0;
    if (depth == 1) {
      if (style == 1) return std::to_string(clause_number_) + "." + std::to_string(index + 1);
      return "(" + letter(index) + ")";
    }
    if (style == 1) return "(" + letter(index) + ")";
    return "(" + roman(index + 1) + ")";
  }

  void emit_sub(const Sub& sub, int index, int depth, std::vector<int>& groups) {
    const int group = next_group_++;
    groups.push_back(group);
    Para p;
    p.role = Role::subclause;
    p.group = group;
    p.kind = BlockKind::list;
    p.indent = sub_indent_ * depth;
    p.space_before = 0.4;
    std::vector<Word> words = words_of(sub_label(index, depth));
    if (!sub.heading.empty()) {
      auto h = words_of(sub.heading + ".");
      for (auto& w : h) {
        w.underline = heading_underline_;
        w.italic = !heading_underline_;
      }
      words.insert(words.end(), h.begin(), h.end());
    }
    std::optional<std::pair<std::size_t, std::size_t>> span;
    auto rest = words_of(join(sub.sentences), &span, words.size());
    words.insert(words.end(), rest.begin(), rest.end());
    p.words = std::move(words);
    attach_answer(p, span);
    push(std::move(p));
    for (std::size_t i = 0; i < sub.children.size(); ++i) {
      emit_sub(sub.children[i], static_cast<int>(i), depth + 1, groups);
    }
  }

  void attach_answer(Para& p,
                     const std::optional<std::pair<std::size_t, std::size_t>>& span) {
    if (!span || !pending_answer_) return;
    p.answer = Answer{*pending_answer_, span->first, span->second};
    if (*pending_answer_ == Attribute::governing_law && params_.broken_governing_law) {
      const std::size_t len = span->second - span->first + 1;
      p.break_before = span->first + 1 + rng_.below(len - 1);
    }
    pending_answer_.reset();
  }

  static std::string join(const std::vector<std::string>& sentences) {
    std::string out;
    for (const auto& s : sentences) {
      if (!out.empty()) out += ' ';
      out += s;
    }
    return out;
  }

  // --- front and back matter ---------------------------------------------

  void write_front_matter() {
    Para title;
    title.words = words_of(draft_.title);
    for (auto& w : title.words) w.bold = true;
    title.align = Align::center;
    title.font_scale = 1.3;
    title.kind = BlockKind::other;
    title.space_before = 0;
    push(std::move(title));

    const std::string ja = other_jurisdiction();
    const std::string jb = other_jurisdiction();
    std::string pre =
        "This " + title_case(draft_.title) +
        " (the \"Agreement\") is entered into as of " + date() +
        " (the \"Effective Date\") by and between " + draft_.company_a +
        ", a corporation organized under the laws of the " + ja + " (\"" +
        role_a_ + "\"), and " + draft_.company_b +
        ", a limited liability company organized under the laws of the " + jb +
        " (\"" + role_b_ + "\").";
    Para p;
    p.words = words_of(pre);
    p.space_before = 1.5;
    push(std::move(p));

    const std::size_t recitals = rng_.between(1, 3);
    for (std::size_t i = 0; i < recitals; ++i) {
      Para r;
      r.words = words_of(fill("WHEREAS, " + std::string(i % 2 ? "{B}" : "{A}") +
                              " desires to " +
                              lower_first(rng_.pick(kActions)) + "; and"));
      push(std::move(r));
    }
    Para now;
    now.words = words_of(
        "NOW, THEREFORE, in consideration of the mutual covenants contained "
        "herein, the Parties agree as follows:");
    push(std::move(now));
  }

  static std::string title_case(const std::string& s) {
    std::string out = s;
    bool start = true;
    for (char& c : out) {
      const auto u = static_cast<unsigned char>(c);
      c = static_cast<char>(start ? std::toupper(u) : std::tolower(u));
      start = c == ' ';
    }
    return out;
  }

  static std::string lower_first(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
    return s;
  }

  void write_signature_block() {
    Para w;
    w.words = words_of(
        "IN WITNESS WHEREOF, the Parties have caused this Agreement to be "
        "executed by their duly authorized representatives as of the "
        "Effective Date.");
    w.space_before = 1.5;
    push(std::move(w));
    for (const std::string& company : {draft_.company_a, draft_.company_b}) {
      const std::string name = rng_.pick(kFirstNames) + " " + rng_.pick(kLastNames);
      const std::vector<std::string> lines = {
          upper(company), "By: /s/ " + name, "Name: " + name,
          "Title: " + rng_.pick(kOfficerTitles)};
      bool first = true;
      for (const auto& l : lines) {
        Para p;
        p.words = words_of(l);
        p.kind = BlockKind::other;
        p.space_before = first ? 1.2 : 0.0;
        if (first) {
          for (auto& x : p.words) x.bold = true;
        }
        first = false;
        push(std::move(p));
      }
    }
  }

  void write_schedule() {
    Para h;
    h.words = words_of("SCHEDULE A");
    for (auto& x : h.words) x.bold = true;
    h.align = Align::center;
    h.space_before = 2.0;
    h.kind = BlockKind::other;
    push(std::move(h));
    Para sub;
    sub.words = words_of("FEES AND QUANTITIES");
    sub.align = Align::center;
    sub.kind = BlockKind::other;
    sub.space_before = 0.2;
    push(std::move(sub));

    Para t;
    t.kind = BlockKind::table;
    t.columns = {0, 40, 300, 380};
    t.space_before = 0.8;
    t.rows.push_back({words_of("No."), words_of("Item"), words_of("Qty"),
                      words_of("Amount")});
    const std::size_t rows = rng_.between(4, 14);
    for (std::size_t r = 0; r < rows; ++r) {
      t.rows.push_back({words_of(std::to_string(r + 1)), words_of(rng_.pick(kFeeItems)),
                        words_of(std::to_string(rng_.between(1, 40))),
                        words_of(std::to_string(rng_.between(1, 99)) + "," +
                                 std::to_string(rng_.between(100, 999)))});
    }
    push(std::move(t));
  }

  // --- clauses ----------------------------------------------------------------

  std::vector<std::string> filler_sentences(std::size_t lo, std::size_t hi) {
    std::vector<std::string> out;
    const std::size_t n = rng_.between(lo, hi);
    for (std::size_t i = 0; i < n; ++i) out.push_back(generic_sentence());
    return out;
  }

  void maybe_subs(Clause& c, double prob) {
    if (!rng_.chance(prob)) return;
    if (!c.sentences.empty()) {
      c.sentences.back().back() = ':';
    }
    const std::size_t n = rng_.between(2, 5);
    for (std::size_t i = 0; i < n; ++i) {
      Sub s;
      s.sentences = filler_sentences(1, 3);
      if (rng_.chance(sub_heading_prob_)) s.heading = rng_.pick(kDefinedTerms);
      if (rng_.chance(0.15)) {
        const std::size_t m = rng_.between(2, 3);
        for (std::size_t j = 0; j < m; ++j) {
          Sub child;
          child.sentences = filler_sentences(1, 1);
          s.children.push_back(std::move(child));
        }
      }
      c.subs.push_back(std::move(s));
    }
  }

  void write_filler_clause(const Topic& topic) {
    Clause c;
    c.title = topic.title;
    const std::size_t own = rng_.between(1, topic.sentences.size());
    std::vector<std::string> pool = topic.sentences;
    rng_.shuffle(pool);
    for (std::size_t i = 0; i < own; ++i) c.sentences.push_back(fill(pool[i]));
    auto extra = filler_sentences(0, 4);
    c.sentences.insert(c.sentences.end(), extra.begin(), extra.end());
    maybe_subs(c, 0.35);
    emit_clause(c);
  }

  void write_definitions() {
    Clause c;
    c.title = "Definitions";
    c.sentences = {"As used in this Agreement, the following terms have the "
                   "meanings set forth below:"};
    std::vector<std::size_t> order(kDefinedTerms.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng_.shuffle(order);
    const std::size_t n = rng_.between(4, 10);
    for (std::size_t i = 0; i < n; ++i) {
      Sub s;
      s.sentences = {"\"" + kDefinedTerms[order[i]] + "\" means " +
                     kDefinitions[order[i]] + "."};
      c.subs.push_back(std::move(s));
    }
    emit_clause(c);
  }

  std::vector<std::string> term_sentences() {
    std::vector<std::string> out;
    pending_answer_ = Attribute::expiration_date;
    switch (rng_.below(5)) {
      case 0:
        out.push_back("This Agreement shall commence on the Effective Date and shall continue in full force and effect until [[" +
                      date() + "]], unless terminated earlier in accordance with Section " +
                      std::to_string(rng_.between(2, 20)) + ".");
        break;
      case 1:
        out.push_back("The term of this Agreement shall be [[" + duration() +
                      "]] from the Effective Date (the \"Term\").");
        break;
      case 2:
        out.push_back("This Agreement shall remain in effect for a period of [[" + duration() +
                      "]] commencing on " + date() + ".");
        break;
      case 3:
        out.push_back("Unless earlier terminated, this Agreement will expire on [[" + date() + "]].");
        break;
      default:
        out.push_back("This Agreement shall be effective from " + date() +
                      " and shall continue until [[" + date() + "]].");
        break;
    }
    if (rng_.chance(0.5)) {
      out.push_back("Thereafter, this Agreement shall automatically renew for successive " +
                    duration() + " periods unless either Party provides notice of non-renewal at least " +
                    rng_.pick(kNoticeDays) + " days prior to the end of the then-current term.");
    }
    if (rng_.chance(0.3)) {
      out.push_back("Any renewal pricing shall be agreed in writing no later than " + date() + ".");
    }
    return out;
  }

  std::string convenience_sentence() {
    switch (rng_.below(5)) {
      case 0:
        return fill("Either Party may terminate this Agreement for convenience upon " +
                    rng_.pick(kNoticeDays) + " days' prior written notice to the other Party.");
      case 1:
        return fill("{B} may terminate this Agreement at any time, with or without cause, by giving " +
                    rng_.pick(kNoticeDays) + " days written notice to {A}.");
      case 2:
        return fill("{B} may terminate this Agreement without cause upon " +
                    rng_.pick(kNoticeDays) + " days notice.");
      case 3:
        return "Either party may terminate at will upon written notice to the other party.";
      default:
        return "This Agreement may be terminated by either party for any reason or no reason upon " +
               rng_.pick(kNoticeDays) + " days' notice.";
    }
  }

  std::string cause_sentence() {
    switch (rng_.below(4)) {
      case 0:
        return "Either Party may terminate this Agreement for the material breach of the other Party that remains uncured " +
               rng_.pick(kNoticeDays) + " days after written notice thereof.";
      case 1:
        return "This Agreement may be terminated by either party with cause upon " +
               rng_.pick(kNoticeDays) + " days written notice.";
      case 2:
        return "Either party may terminate this Agreement immediately upon written notice if the other party becomes insolvent or files a petition in bankruptcy.";
      default:
        return fill("{A} may terminate this Agreement immediately without notice upon a breach by {B} of its payment obligations.");
    }
  }

  std::vector<std::string> termination_sentences() {
    std::vector<std::string> out;
    const std::size_t causes = rng_.between(draft_.termination_for_convenience ? 0 : 1, 2);
    for (std::size_t i = 0; i < causes; ++i) out.push_back(cause_sentence());
    if (draft_.termination_for_convenience) {
      out.insert(out.begin() + static_cast<std::ptrdiff_t>(rng_.below(out.size() + 1)),
                 convenience_sentence());
    }
    if (rng_.chance(0.6)) {
      out.push_back(fill("Upon expiration or termination for any reason, {B} shall pay all Fees accrued through the effective date of termination."));
    }
    return out;
  }

  void write_term_clause(bool) {
    Clause c;
    c.title = rng_.pick(kHeadingTerm);
    c.sentences = term_sentences();
    auto groups = emit_clause(c);
    add_evidence(Attribute::expiration_date, groups);
  }

  void write_termination_clause() {
    Clause c;
    c.title = rng_.pick(kHeadingTermination);
    auto sentences = termination_sentences();
    if (sentences.size() >= 2 && rng_.chance(0.4)) {
      c.sentences = {"This Agreement may be terminated as follows:"};
      for (auto& s : sentences) {
        Sub sub;
        sub.sentences = {s};
        c.subs.push_back(std::move(sub));
      }
    } else {
      c.sentences = std::move(sentences);
    }
    auto groups = emit_clause(c);
    add_evidence(Attribute::termination_for_convenience, groups);
  }

  void write_combo_clause() {
    Clause c;
    c.title = "Term and Termination";
    c.sentences = {"The following provisions govern the duration of this Agreement:"};
    Sub term;
    term.heading = "Term";
    term.sentences = term_sentences();
    Sub termination;
    termination.heading = "Termination";
    termination.sentences = termination_sentences();
    c.subs = {std::move(term), std::move(termination)};
    auto groups = emit_clause(c);
    add_evidence(Attribute::expiration_date, groups);
    add_evidence(Attribute::termination_for_convenience, groups);
  }

  void write_assignment_clause() {
    Clause c;
    c.title = rng_.pick(kHeadingAssignment);
    if (draft_.anti_assignment) {
      switch (rng_.below(5)) {
        case 0:
          c.sentences.push_back("Neither Party shall assign this Agreement or any of its rights or obligations hereunder without the prior written consent of the other Party.");
          break;
        case 1:
          c.sentences.push_back(fill("{B} may not assign, delegate or otherwise transfer this Agreement without the express written approval of {A}."));
          break;
        case 2:
          c.sentences.push_back("This Agreement may not be assigned by either party without the consent of the other party, which consent shall not be unreasonably withheld.");
          break;
        case 3:
          c.sentences.push_back("Neither this Agreement nor any rights or obligations hereunder may be assigned, pledged or transferred by either party without the express prior written approval of the other party.");
          break;
        default:
          c.sentences.push_back(fill("{B} shall not transfer this Agreement to any third party unless {A} has first consented in writing."));
          break;
      }
      if (rng_.chance(0.4)) {
        c.sentences.push_back("Notwithstanding the foregoing, either Party may assign this Agreement without consent to an Affiliate or to a successor in connection with a merger.");
      }
      if (rng_.chance(0.5)) {
        c.sentences.push_back("Any attempted assignment in violation of this Section shall be null and void.");
      }
    } else {
      switch (rng_.below(3)) {
        case 0:
          c.sentences.push_back("Either Party may freely assign this Agreement, in whole or in part, without the consent of the other Party.");
          break;
        case 1:
          c.sentences.push_back(fill("{B} may assign this Agreement to any third party upon written notice to {A}."));
          break;
        default:
          c.sentences.push_back("This Agreement may be assigned by either Party without restriction.");
          break;
      }
    }
    if (!draft_.anti_assignment || rng_.chance(0.5)) {
      c.sentences.push_back("This Agreement shall be binding upon and inure to the benefit of the Parties and their respective successors and assigns.");
    }
    auto groups = emit_clause(c);
    add_evidence(Attribute::anti_assignment, groups);
  }

  // `subject` is the governed instrument in lower-case form, e.g. "this
  // Agreement".
  std::string governing_sentence(const std::string& subject, const std::string& jur) {
    const std::string cap = std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(subject[0])))) +
                            subject.substr(1);
    switch (rng_.below(5)) {
      case 0:
        return cap + " shall be governed by and construed in accordance with the laws of the " + jur + ", without regard to its conflict of laws principles.";
      case 1:
        return cap + " shall be construed and interpreted in accordance with the laws of the " + jur + ", without recourse to any principles of law governing conflicts of law, which might otherwise be applicable.";
      case 2:
        return "The validity, interpretation and performance of " + subject + " shall be governed by the laws of the " + jur + ".";
      case 3:
        return cap + " and all matters pertaining hereto shall be governed by and construed under the laws of the " + jur + ", except to the extent that the conflict of law rules of said state would require otherwise.";
      default:
        return "Without reference to choice or conflict of law principles, " + subject + " shall be governed by and construed in accordance with the laws of the " + jur + ".";
    }
  }

  // An ancillary agreement with its own choice of law.
  void write_related_agreement_clause() {
    Clause c;
    const std::string name = rng_.pick(Strings{"Escrow Agreement", "Security Agreement", "Supply Agreement", "Guaranty"});
    c.title = rng_.pick(Strings{"Related Agreements", "Ancillary Documents"});
    c.sentences.push_back("Concurrently with the execution of this Agreement, the Parties shall enter into the " + name +
                          " substantially in the form attached hereto.");
    c.sentences.push_back(governing_sentence("the " + name, other_jurisdiction()));
    auto extra = filler_sentences(0, 1);
    c.sentences.insert(c.sentences.end(), extra.begin(), extra.end());
    emit_clause(c);
  }

  void write_governing_clause() {
    Clause c;
    c.title = rng_.pick(kHeadingGoverning);
    const std::string jur = "[[" + governing_ + "]]";
    pending_answer_ = Attribute::governing_law;
    c.sentences.push_back(governing_sentence("this Agreement", jur));
    if (rng_.chance(0.6)) {
      c.sentences.push_back("Each Party irrevocably submits to the exclusive jurisdiction of the courts located in " +
                            rng_.pick(kCounties) + " County for any action arising out of this Agreement.");
    }
    if (rng_.chance(0.4)) {
      c.sentences.push_back("EACH PARTY HEREBY WAIVES ITS RIGHT TO A JURY TRIAL IN ANY ACTION ARISING OUT OF THIS AGREEMENT.");
    }
    auto groups = emit_clause(c);
    add_evidence(Attribute::governing_law, groups);
  }

  void write_representations_clause() {
    Clause c;
    c.title = rng_.pick(Strings{"Representations and Warranties", "Mutual Representations"});
    c.sentences.push_back("Each Party represents and warrants that it is duly organized, validly existing and in good standing under the laws of the " +
                          other_jurisdiction() +
                          (rng_.chance(0.5) ? "." : ", with full corporate power to conduct its business as now conducted."));
    c.sentences.push_back("Each Party has full power and authority to enter into and perform this Agreement.");
    auto extra = filler_sentences(0, 2);
    c.sentences.insert(c.sentences.end(), extra.begin(), extra.end());
    emit_clause(c);
  }

  void write_compliance_clause() {
    Clause c;
    c.title = "Compliance with Laws";
    c.sentences.push_back(fill("{A} shall comply with all applicable laws of the " +
                               other_jurisdiction() + " in performing its obligations hereunder."));
    auto extra = filler_sentences(0, 2);
    c.sentences.insert(c.sentences.end(), extra.begin(), extra.end());
    emit_clause(c);
  }

  void write_disputes_clause() {
    Clause c;
    c.title = rng_.pick(Strings{"Dispute Resolution", "Arbitration"});
    c.sentences.push_back("Any dispute arising out of this Agreement shall be finally settled by binding arbitration under the commercial rules of the American Arbitration Association.");
    c.sentences.push_back("Judgment on the award may be entered in the courts of the " +
                          other_jurisdiction() +
                          (rng_.chance(0.5) ? "." : ", and each Party consents to the jurisdiction of such courts."));
    auto extra = filler_sentences(0, 1);
    c.sentences.insert(c.sentences.end(), extra.begin(), extra.end());
    emit_clause(c);
  }

  void add_evidence(Attribute a, const std::vector<int>& groups) {
    auto& dst = draft_.evidence_groups[index_of(a)];
    dst.insert(dst.end(), groups.begin(), groups.end());
  }

  Rng& rng_;
  DraftParams params_;
  Draft draft_;
  int numbering_ = 0;
  bool heading_bold_ = true;
  bool heading_underline_ = false;
  double sub_heading_prob_ = 0.3;
  double sub_indent_ = 18;
  int clause_number_ = 0;
  int next_group_ = 0;
  std::string role_a_;
  std::string role_b_;
  std::string governing_;
  std::optional<Attribute> pending_answer_;
};

}  // namespace

Draft write_contract(Rng& rng, const DraftParams& params) {
  return Writer(rng, params).build();
}

}  // namespace cuesplit::synth

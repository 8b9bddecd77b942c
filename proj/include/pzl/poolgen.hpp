#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "pzl/image.hpp"
#include "pzl/png.hpp"
#include "pzl/pools.hpp"
#include "pzl/rng.hpp"
#include "pzl/rules.hpp"

namespace pzl::poolgen {

// Desk-scale sample pools, synthesized on demand so the repository ships no
// binary assets. Icons and scene images are procedural; the word and hanzi
// corpora are embedded below. Users point the generator at their own pools
// for larger runs.

// --- Embedded text corpora -----------------------------------------------------

inline const char* embedded_words() {
  return
      "AN AT AS BE BY DO GO HE IF IN IS IT ME MY NO OF ON OR SO TO UP US WE AM OX HI OK ID\n"
      "ACE ACT ADD AGE AGO AID AIM AIR ALL AND ANT ANY APE ARC ARE ARK ARM ART ASH ASK ATE\n"
      "BAD BAG BAN BAR BAT BAY BED BEE BEG BET BIG BIN BIT BOW BOX BOY BUD BUG BUN BUS BUT BUY\n"
      "CAB CAN CAP CAR CAT COW CRY CUB CUP CUT DAD DAM DAY DEN DEW DIG DIM DIP DOG DOT DRY DUE DUG\n"
      "EAR EAT EGG EGO ELF END ERA EVE EYE FAN FAR FAT FEE FEW FIG FIN FIT FIX FLY FOG FOR FOX FUN FUR\n"
      "GAP GAS GEM GET GUM GUN GUT GUY GYM HAD HAM HAS HAT HAY HEN HER HID HIM HIP HIS HIT HOG HOP HOT HOW HUB HUE HUG HUT\n"
      "ICE ILL INK ION ITS IVY JAM JAR JAW JET JOB JOG JOY KEY KID KIT LAB LAG LAP LAW LAY LEG LET LID LIE LIP LIT LOG LOT LOW\n"
      "MAD MAN MAP MAT MAY MEN MET MIX MOB MOM MUD MUG NAP NET NEW NOD NOR NOT NOW NUT OAK ODD OFF OIL OLD ONE OUR OUT OWL OWN\n"
      "PAD PAN PAW PAY PEA PEN PET PIE PIG PIN PIT POT PRO PUB PUT RAG RAM RAN RAT RAW RAY RED RIB RID RIM ROB ROD ROT ROW RUB RUG RUN\n"
      "SAD SAT SAW SAY SEA SEE SET SHE SHY SIN SIP SIR SIT SIX SKI SKY SON SPA SPY SUM SUN TAB TAG TAN TAP TAX TEA TEN THE TIE TIN TIP TOE TON TOP TOY TRY TUB TWO\n"
      "USE VAN VAT VET VIA WAR WAS WAX WAY WEB WET WHO WHY WIG WIN WIT WON YES YET YOU ZIP ZOO\n"
      "ABLE ACID AREA ARMY AWAY BABY BACK BALL BAND BANK BASE BATH BEAR BEAT BELL BELT BEND BEST BIRD BLUE BOAT BODY BONE BOOK BOOT BORN BOTH BOWL BURN BUSY\n"
      "CAKE CALL CALM CAME CAMP CARD CARE CASE CASH CAST CAVE CELL CHAT CHIP CITY CLAY CLUB COAL COAT CODE COLD COME COOK COOL COPY CORE COST CREW CROP\n"
      "DARK DATA DATE DAWN DEAD DEAL DEAR DEBT DEEP DESK DIAL DIET DISH DOOR DOSE DOWN DRAW DREW DROP DRUM DUCK DUST DUTY\n"
      "EACH EARN EASE EAST EASY EDGE ELSE EVEN EVER EXIT FACE FACT FAIL FAIR FALL FARM FAST FATE FEAR FEED FEEL FEET FELL FELT FILE FILL FILM FIND FINE FIRE FIRM FISH FIVE FLAG FLAT FLEW FLOW FOOD FOOT FORM FORT FOUR FREE FROG FROM FUEL FULL FUND\n"
      "GAIN GAME GATE GAVE GEAR GIFT GIRL GIVE GLAD GOAL GOAT GOES GOLD GOLF GONE GOOD GRAY GREW GRID GROW GULF HAIR HALF HALL HAND HANG HARD HARM HATE HAVE HEAD HEAR HEAT HELD HELP HERE HERO HIGH HILL HINT HIRE HOLD HOLE HOME HOPE HORN HOST HOUR HUGE HUNT HURT\n"
      "IDEA INCH INTO IRON ITEM JAZZ JOIN JUMP JURY JUST KEEN KEEP KEPT KICK KIND KING KNEE KNEW KNOW LACK LAKE LAMP LAND LANE LAST LATE LAZY LEAD LEAF LEAN LEFT LENS LESS LIFE LIFT LIKE LIME LINE LION LIST LIVE LOAD LOAN LOCK LONG LOOK LORD LOSE LOSS LOST LOUD LOVE LUCK\n"
      "MADE MAIL MAIN MAKE MALE MANY MARK MASK MASS MATH MEAL MEAN MEAT MEET MENU MILD MILE MILK MIND MINE MISS MODE MOOD MOON MORE MOST MOVE MUCH MUST NAME NAVY NEAR NECK NEED NEWS NEXT NICE NINE NODE NONE NOON NOSE NOTE\n"
      "OBEY ONCE ONLY OPEN ORAL OVEN OVER PACE PACK PAGE PAID PAIN PAIR PALE PALM PARK PART PASS PAST PATH PEAK PICK PINE PINK PIPE PLAN PLAY PLOT PLUG PLUS POEM POET POLE POLL POOL POOR PORT POSE POST POUR PRAY PULL PURE PUSH QUIT\n"
      "RACE RAIL RAIN RANK RARE RATE READ REAL REAR RELY RENT REST RICE RICH RIDE RING RISE RISK ROAD ROCK ROLE ROLL ROOF ROOM ROOT ROPE ROSE RUIN RULE RUSH\n"
      "SAFE SAID SAIL SALE SALT SAME SAND SAVE SEAT SEED SEEK SEEM SEEN SELF SELL SEND SENT SHIP SHOE SHOP SHOT SHOW SHUT SICK SIDE SIGN SING SITE SIZE SKIN SLIP SLOW SNOW SOFT SOIL SOLD SOLE SOME SONG SOON SORT SOUL SOUP SPIN SPOT STAR STAY STEM STEP STIR STOP SUCH SUIT SURE SWIM\n"
      "TAIL TAKE TALE TALK TALL TANK TAPE TASK TAXI TEAM TELL TEND TENT TERM TEST TEXT THAN THAT THEM THEN THEY THIN THIS TIDE TIME TINY TOLD TOLL TONE TOOK TOOL TOUR TOWN TREE TRIM TRIP TRUE TUNE TURN TWIN TYPE\n"
      "UNIT UPON USED USER VARY VAST VERY VIEW VOTE WAGE WAIT WAKE WALK WALL WANT WARM WASH WAVE WEAK WEAR WEEK WELL WENT WERE WEST WHAT WHEN WHOM WIDE WIFE WILD WILL WIND WINE WING WIRE WISE WISH WITH WOLF WOOD WORD WORE WORK YARD YEAR YOUR ZERO ZONE\n"
      "ABOUT ABOVE ACTOR ADMIT ADOPT AFTER AGAIN AGENT AGREE AHEAD ALARM ALBUM ALERT ALIKE ALIVE ALLOW ALONE ALONG ALTER ANGER ANGLE ANGRY APART APPLE APPLY ARENA ARGUE ARISE ARRAY ASIDE ASSET AVOID AWARD AWARE\n"
      "BADLY BAKER BASIC BEACH BEGAN BEGIN BEING BELOW BENCH BIRTH BLACK BLAME BLANK BLIND BLOCK BLOOD BOARD BOOST BOOTH BOUND BRAIN BRAND BRAVE BREAD BREAK BRICK BRIEF BRING BROAD BROWN BUILD BUYER\n"
      "CABIN CABLE CARRY CATCH CAUSE CHAIN CHAIR CHART CHASE CHEAP CHECK CHEST CHIEF CHILD CHOSE CIVIL CLAIM CLASS CLEAN CLEAR CLICK CLIMB CLOCK CLOSE CLOUD COACH COAST COULD COUNT COURT COVER CRAFT CRASH CREAM CRIME CROSS CROWD CROWN CURVE CYCLE\n"
      "DAILY DANCE DEATH DELAY DEPTH DIRTY DOUBT DOZEN DRAFT DRAMA DREAM DRESS DRINK DRIVE EAGER EARLY EARTH EIGHT ELITE EMPTY ENEMY ENJOY ENTER ENTRY EQUAL ERROR EVENT EVERY EXACT EXIST EXTRA\n"
      "FAITH FALSE FAULT FIBER FIELD FIFTH FIFTY FIGHT FINAL FIRST FLEET FLOOR FLUID FOCUS FORCE FORTH FORTY FORUM FOUND FRAME FRANK FRAUD FRESH FRONT FRUIT FULLY FUNNY\n"
      "GIANT GIVEN GLASS GLOBE GOING GRACE GRADE GRAND GRANT GRASS GREAT GREEN GROSS GROUP GROWN GUARD GUESS GUEST GUIDE HAPPY HEART HEAVY HELLO HENCE HORSE HOTEL HOUSE HUMAN\n"
      "IDEAL IMAGE INDEX INNER INPUT ISSUE JOINT JUDGE KNOWN LABEL LARGE LASER LATER LAUGH LAYER LEARN LEASE LEAST LEAVE LEGAL LEVEL LIGHT LIMIT LOCAL LOGIC LOOSE LOWER LUCKY LUNCH\n"
      "MAGIC MAJOR MAKER MARCH MATCH MAYBE MAYOR MEANT MEDIA METAL MIGHT MINOR MINUS MIXED MODEL MONEY MONTH MORAL MOTOR MOUNT MOUSE MOUTH MOVIE MUSIC NEVER NEWLY NIGHT NOISE NORTH NOTED NOVEL NURSE\n"
      "OCCUR OCEAN OFFER OFTEN ORDER OTHER OUGHT PAINT PANEL PAPER PARTY PEACE PHASE PHONE PHOTO PIECE PILOT PITCH PLACE PLAIN PLANE PLANT PLATE POINT POUND POWER PRESS PRICE PRIDE PRIME PRINT PRIOR PRIZE PROOF PROUD PROVE\n"
      "QUEEN QUICK QUIET QUITE RADIO RAISE RANGE RAPID RATIO REACH READY REFER RIGHT RIVAL RIVER ROUGH ROUND ROUTE ROYAL RURAL\n"
      "SCALE SCENE SCOPE SCORE SENSE SERVE SEVEN SHALL SHAPE SHARE SHARP SHEET SHELF SHELL SHIFT SHINE SHIRT SHOCK SHOOT SHORE SHORT SHOUT SIGHT SINCE SIXTH SKILL SLEEP SLIDE SMALL SMART SMILE SMOKE SOLID SOLVE SORRY SOUND SOUTH SPACE SPARE SPEAK SPEED SPEND SPLIT SPORT STAFF STAGE STAND START STATE STEAM STEEL STICK STILL STOCK STONE STOOD STORE STORM STORY STRIP STUCK STUDY STUFF STYLE SUGAR SUITE SUPER SWEET\n"
      "TABLE TAKEN TASTE TEACH TEETH THANK THEIR THEME THERE THESE THICK THING THINK THIRD THOSE THREE THREW THROW TIGHT TIRED TITLE TODAY TOPIC TOTAL TOUCH TOUGH TOWER TRACK TRADE TRAIN TREAT TREND TRIAL TRIBE TRICK TRIED TRUCK TRULY TRUST TRUTH TWICE\n"
      "UNCLE UNDER UNION UNITY UNTIL UPPER URBAN USAGE USUAL VALID VALUE VIDEO VIRUS VISIT VITAL VOICE WASTE WATCH WATER WHEEL WHERE WHICH WHILE WHITE WHOLE WHOSE WOMAN WORLD WORRY WORSE WORST WORTH WOULD WOUND WRITE WRONG WROTE YIELD YOUNG YOUTH\n"
      "ACCEPT ACCESS ACTION ACTIVE ACTUAL ADVICE ADVISE AFFORD AFRAID AGENCY AGENDA ALMOST ALWAYS AMOUNT ANIMAL ANNUAL ANSWER ANYONE ANYWAY APPEAR AROUND ARRIVE ARTIST ASPECT ASSIST ASSUME ATTACK ATTEND AUTHOR AVENUE\n"
      "BATTLE BEAUTY BECAME BECOME BEFORE BEHALF BEHIND BELIEF BELONG BETTER BEYOND BORDER BOTTLE BOTTOM BOUGHT BRANCH BREATH BRIDGE BRIGHT BROKEN BUDGET BURDEN BUREAU BUTTON\n"
      "CAMERA CANCER CANNOT CARBON CAREER CASTLE CASUAL CAUGHT CENTER CHANCE CHANGE CHARGE CHOICE CHOOSE CHOSEN CHURCH CIRCLE CLIENT CLOSED CLOSER COFFEE COLUMN COMBAT COMING COMMON COPPER CORNER COSTLY COUNTY COUPLE COURSE CREATE CREDIT CRISIS CUSTOM\n"
      "DAMAGE DANGER DEALER DEBATE DECADE DECIDE DEFEAT DEFEND DEFINE DEGREE DEMAND DEPEND DEPUTY DESERT DESIGN DESIRE DETAIL DETECT DEVICE DIFFER DINNER DIRECT DOCTOR DOLLAR DOMAIN DOUBLE DRIVEN DURING\n"
      "EASILY EATING EDITOR EFFECT EFFORT EIGHTH EITHER ELEVEN EMERGE EMPIRE EMPLOY ENABLE ENDING ENERGY ENGAGE ENGINE ENOUGH ENSURE ENTIRE ENTITY EQUITY ESCAPE ESTATE EXCEED EXCEPT EXCESS EXPAND EXPECT EXPERT EXPORT EXTEND EXTENT\n"
      "FABRIC FACING FACTOR FAILED FAIRLY FALLEN FAMILY FAMOUS FATHER FELLOW FEMALE FIGURE FILING FINGER FINISH FISCAL FLIGHT FLYING FOLLOW FORCED FOREST FORGET FORMAL FORMAT FORMER FOSTER FOURTH FRENCH FRIEND FUTURE\n"
      "GARDEN GATHER GENDER GLOBAL GOLDEN GROUND GROWTH GUILTY HANDLE HAPPEN HARDLY HEALTH HEIGHT HIDDEN HOLDER HONEST IMPACT IMPORT INCOME INDEED INJURY INSIDE INTENT INVEST ISLAND ITSELF JUNIOR\n"
      "LATTER LAUNCH LAWYER LEADER LEAGUE LEGACY LENGTH LESSON LETTER LIKELY LISTEN LITTLE LIVING LOCATE LOCKED LONGER LOOKED LOSING LOVELY MAINLY MAKING MANAGE MANNER MARGIN MARINE MARKET MASTER MATTER MATURE MEDIUM MEMBER MEMORY MENTAL MERELY MERGER METHOD MIDDLE MINING MINUTE MIRROR MOBILE MODERN MODEST MODULE MOMENT MOSTLY MOTHER MOTION MOVING MURDER MUSEUM MUTUAL MYSELF\n"
      "NARROW NATION NATIVE NATURE NEARBY NEARLY NOBODY NORMAL NOTICE NOTION NUMBER OBJECT OBTAIN OFFICE OFFSET ONLINE OPTION ORANGE ORIGIN OUTPUT PACKED PALACE PARENT PARTLY PATENT PEOPLE PERIOD PERMIT PERSON PHRASE PICKED PLANET PLAYER PLEASE PLENTY POCKET POLICE POLICY PREFER PRETTY PRINCE PRISON PROFIT PROPER PROVEN PUBLIC PURSUE\n"
      "RAISED RANDOM RARELY RATHER RATING READER REALLY REASON RECALL RECENT RECORD REDUCE REFORM REGARD REGIME REGION RELATE RELIEF REMAIN REMOTE REMOVE REPAIR REPEAT REPORT RESCUE RESORT RESULT RETAIL RETAIN RETURN REVEAL REVIEW REWARD RIDING RISING ROBUST RULING\n"
      "SAFETY SALARY SAMPLE SAVING SAYING SCHEME SCHOOL SCREEN SEARCH SEASON SECOND SECRET SECTOR SECURE SEEING SELECT SENIOR SERIES SERVER SETTLE SEVERE SHADOW SHARED SHOULD SIGNAL SIGNED SILENT SILVER SIMPLE SIMPLY SINGLE SISTER SLIGHT SMOOTH SOCIAL SOLELY SOURCE SPEECH SPIRIT SPOKEN SPREAD SPRING SQUARE STABLE STATUS STEADY STOLEN STRAIN STREAM STREET STRESS STRICT STRIKE STRING STRONG STRUCK SUBMIT SUDDEN SUFFER SUMMER SUMMIT SUPPLY SURELY SURVEY SWITCH SYMBOL SYSTEM\n"
      "TACKLE TAKING TALENT TARGET TAUGHT TEMPLE TENANT TENDER TENNIS THEORY THIRTY THOUGH THREAT THROWN TICKET TIMBER TIMELY TISSUE TOWARD TRAVEL TREATY TRYING TWELVE TWENTY UNABLE UNIQUE UNITED UNLESS UNLIKE UPDATE USEFUL VALLEY VENDOR VERSUS VICTIM VISION VISUAL VOLUME WEALTH WEEKLY WEIGHT WHOLLY WINDOW WINNER WINTER WITHIN WONDER WOODEN WORKER WRITER YELLOW\n"
      "ABILITY ACCOUNT ACHIEVE ACQUIRE ADDRESS ADVANCE ADVISER AGAINST AIRLINE AIRPORT ALCOHOL ALREADY AMAZING ANCIENT ANOTHER ANXIETY ANYBODY APPLIED ARRANGE ARRIVAL ARTICLE ATTEMPT ATTRACT AUCTION AVERAGE\n"
      "BALANCE BANKING BARRIER BATTERY BEARING BECAUSE BEDROOM BELIEVE BENEFIT BETWEEN BILLION BINDING BROTHER BROUGHT BUILDER BURNING CABINET CAPABLE CAPITAL CAPTAIN CAPTURE CAREFUL CARRIER CAUTION CEILING CENTURY CERTAIN CHAMBER CHANNEL CHAPTER CHARITY CHARTER CHECKED CHICKEN CHRONIC CIRCUIT CLASSIC CLIMATE CLOSING CLOTHES COASTAL COLLECT COLLEGE COMBINE COMFORT COMMAND COMMENT COMPANY COMPARE COMPETE COMPLEX CONCEPT CONCERN CONCERT CONDUCT CONFIRM CONNECT CONSENT CONSIST CONTACT CONTAIN CONTENT CONTEST CONTEXT CONTROL CONVERT CORRECT COUNCIL COUNTER COUNTRY CRUCIAL CRYSTAL CULTURE CURRENT CUTTING\n"
      "DEALING DECIDED DECLINE DELIVER DENSITY DESPITE DESTROY DEVELOP DIGITAL DISCUSS DISEASE DISPLAY DISPUTE DISTANT DIVERSE DIVIDED DRAWING DRIVING DYNAMIC EASTERN ECONOMY EDITION ELDERLY ELEMENT ENGAGED ENHANCE ESSENCE EVENING EVIDENT EXACTLY EXAMINE EXAMPLE EXCITED EXCLUDE EXHIBIT EXPENSE EXPRESS EXTREME\n"
      "FACTORY FAILURE FASHION FEATURE FEDERAL FEELING FICTION FIFTEEN FINANCE FINDING FITNESS FOREIGN FOREVER FORMULA FORTUNE FORWARD FOUNDER FREEDOM FURTHER GALLERY GENERAL GENUINE GREATER HABITAT HEARING HERSELF HIGHWAY HIMSELF HISTORY HOLDING HOLIDAY HOUSING HOWEVER HUNDRED HUSBAND\n"
      "ILLEGAL ILLNESS IMAGINE IMPROVE INCLUDE INITIAL INQUIRY INSIGHT INSTALL INSTANT INSTEAD INTENSE INTERIM INVOLVE JOURNAL JOURNEY JUSTICE JUSTIFY KITCHEN LANDING LARGELY LASTING LEADING LIBERAL LIBRARY LICENSE LIMITED LISTING LOGICAL LOYALTY\n"
      "MACHINE MANAGER MARRIED MASSIVE MAXIMUM MEANING MEASURE MEDICAL MEETING MENTION MESSAGE MILLION MINERAL MINIMUM MISSING MISSION MISTAKE MIXTURE MONITOR MONTHLY MORNING MUSICAL MYSTERY NATURAL NEITHER NERVOUS NETWORK NUCLEAR OBVIOUS OFFICER ONGOING OPENING OPERATE OPINION ORGANIC OUTCOME OUTDOOR OUTLOOK OUTSIDE OVERALL\n"
      "PACKAGE PAINTED PARKING PARTIAL PARTNER PASSAGE PASSION PATIENT PATTERN PAYMENT PENALTY PENSION PERFECT PERFORM PERHAPS PHYSICS PICTURE PIONEER PLASTIC POPULAR POVERTY PRECISE PREDICT PREMIUM PREPARE PRESENT PREVENT PRIMARY PRIVATE PROBLEM PROCESS PRODUCE PRODUCT PROGRAM PROJECT PROMISE PROMOTE PROTECT PROTEIN PROVIDE PUBLISH PURPOSE QUALIFY QUALITY QUARTER\n"
      "RADICAL RAILWAY REALITY RECEIPT RECEIVE RECOVER REFLECT REGULAR RELEASE REMOVED REPLACE REQUEST REQUIRE RESERVE RESPECT RESPOND RESTORE RETIRED REVENUE REVERSE ROUTINE RUNNING SATISFY SCIENCE SEGMENT SERIOUS SERVICE SESSION SETTING SEVENTH SEVERAL SHORTLY SIMILAR SOCIETY SOMEHOW SOMEONE SPECIAL SPONSOR STATION STORAGE STRANGE STRETCH STUDENT SUBJECT SUCCEED SUCCESS SUGGEST SUMMARY SUPPORT SUPPOSE SUPREME SURFACE SURGERY SURPLUS SURVIVE SUSPECT SUSTAIN\n"
      "TEACHER TENSION THEATRE THERAPY THOUGHT THROUGH TONIGHT TOURISM TOWARDS TRAFFIC TRAGEDY TRAILER TRAINED TRANSIT TROUBLE TYPICAL UNKNOWN UNUSUAL UPGRADE UTILITY VARIETY VARIOUS VEHICLE VENTURE VERSION VETERAN VICTORY VILLAGE VISIBLE VISITOR WAITING WALKING WARNING WEATHER WEEKEND WELCOME WESTERN WHEREAS WHETHER WILLING WITNESS WORKING WRITING WRITTEN\n"
      "ABSOLUTE ACADEMIC ACCIDENT ACCURATE ACTIVITY ACTUALLY ADDITION ADEQUATE ADJACENT ADVANCED ADVOCATE AIRCRAFT ALTHOUGH ANALYSIS ANNOUNCE ANYTHING ANYWHERE APPARENT APPROACH APPROVAL ARGUMENT ATTITUDE AUDIENCE BACTERIA BASEBALL BATHROOM BIRTHDAY BOUNDARY BUILDING BUSINESS\n"
      "CALENDAR CAMPAIGN CAPACITY CATEGORY CHAIRMAN CHEMICAL CHILDREN CLOTHING COLLAPSE COMPLETE COMPOSED COMPOUND COMPUTER CONCLUDE CONCRETE CONFLICT CONFUSED CONGRESS CONSIDER CONSTANT CONSUMER CONTINUE CONTRACT CONTRARY CONTRAST CONVINCE CORRIDOR COVERAGE CREATIVE CRIMINAL CRITICAL CULTURAL CURRENCY CUSTOMER\n"
      "DATABASE DAUGHTER DECISION DECREASE DELICATE DELIVERY DESCRIBE DESIGNER DETAILED DIALOGUE DISABLED DISASTER DISCOUNT DISCOVER DISTANCE DISTINCT DISTRICT DIVIDEND DIVISION DOCUMENT DOMESTIC DOMINANT DRAMATIC DURATION EARNINGS ECONOMIC EDUCATED EIGHTEEN ELECTION ELECTRIC EMPHASIS EMPLOYEE ENGINEER ENORMOUS ENTIRELY ENVELOPE ESTIMATE EVALUATE EVERYDAY EVERYONE EVIDENCE EXCHANGE EXERCISE EXPLICIT EXPOSURE EXTERNAL\n"
      "FACILITY FAMILIAR FEEDBACK FESTIVAL FOOTBALL FORECAST FOURTEEN FUNCTION GENERATE GRADUATE GUIDANCE HERITAGE HOSPITAL HUMANITY IDENTIFY IDENTITY INCIDENT INCREASE INDICATE INDUSTRY INFORMAL INITIATE INSTANCE INTERNAL INTERVAL JUDGMENT LANGUAGE LAUGHTER LEARNING MAGAZINE MAINTAIN MAJORITY MARRIAGE MATERIAL MEDICINE MIDNIGHT MINISTER MINORITY MOMENTUM MOREOVER MOUNTAIN MOVEMENT MULTIPLE NATIONAL NEGATIVE NINETEEN NUMEROUS OFFERING OPPONENT OPPOSITE OPTIMISM ORDINARY ORGANIZE OVERCOME OVERSEAS PAINTING PARALLEL PATIENCE PEACEFUL PERSONAL PHYSICAL PLATFORM PLEASANT PLEASURE POLITICS PORTRAIT POSITION POSITIVE POSSIBLE POWERFUL PRACTICE PRECIOUS PREGNANT PRESENCE PRESSURE PREVIOUS PRINCESS PRIORITY PROGRESS PROPERTY PROPOSAL PROSPECT PROVINCE PURCHASE QUantity QUESTION RATIONAL REACTION RECENTLY REGIONAL REGISTER RELATION RELATIVE RELEVANT RELIABLE RELIGION REMEMBER RESEARCH RESIDENT RESOURCE RESPONSE SCENARIO SCHEDULE SECURITY SENTENCE SEPARATE SHOULDER SLightly SOFTWARE SOLUTION SOUTHERN SPECIFIC SPECTRUM STANDARD STRATEGY STRENGTH STRUGGLE SUITABLE SUPERIOR SURPRISE SYNDROME TAXPAYER TEACHING TENDENCY THEORIES THINKING THOUSAND TOGETHER TOMORROW TRAINING TRANSFER UMBRELLA UNLIKELY VACATION VALUABLE VIOLENCE WHATEVER YOURSELF\n"
      "ADVANTAGE ADVENTURE AFTERNOON AGREEMENT ALIGNMENT APPARATUS ATTENTION AUTHORITY AUTOMATIC AWARENESS BEAUTIFUL BEGINNING BREAKFAST BRILLIANT CHALLENGE CHARACTER CHEMISTRY CHILDHOOD COMMUNITY COMPANION COMPLAINT COMPONENT CONDITION CONFIDENT CONSCIOUS CONTINENT CORPORATE CRITERION DANGEROUS DEMOCRACY DEPARTURE DETERMINE DIFFERENT DIMENSION DIRECTION DISCOVERY EDUCATION EFFECTIVE EFFICIENT EMPHASIZE ENCOUNTER EQUIPMENT ESSENTIAL ESTABLISH EVERYBODY EXCELLENT EXCEPTION EXCLUSIVE EXECUTIVE EXISTENCE EXPANSION EXPENSIVE EXTENSION EXTENSIVE FRAMEWORK FREQUENCY GUARANTEE HAPPINESS HISTORIAN IMPORTANT INFLUENCE INSURANCE INTENSITY INTERFACE INTERVIEW KNOWLEDGE LANDSCAPE MARKETING NECESSARY OBJECTIVE OPERATION PRINCIPAL PRINCIPLE PROCEDURE PROFESSOR PROMINENT PROVISION PUBLISHER REDUCTION REFERENCE REMAINDER SCIENTIST SECRETARY SELECTION SEPTEMBER SITUATION SOMETHING SOMETIMES STATEMENT STRUCTURE SUBSTANCE TECHNIQUE TELEPHONE THEREFORE THRESHOLD TRADITION TREATMENT VEGETABLE WONDERFUL YESTERDAY\n";
}

inline const char* embedded_hanzi() {
  return
      "的 一 是 不 了 人 我 在 有 他 这 中 大 来 上 国 个 到 说 们 为 子 和 你 地 出 道 也 时 年\n"
      "得 就 那 要 下 以 生 会 自 着 去 之 过 家 学 对 可 她 里 后 小 么 心 多 天 而 能 好 都 然\n"
      "没 日 于 起 还 发 成 事 只 作 当 想 看 文 无 开 手 十 用 主 行 方 又 如 前 所 本 见 经 头\n"
      "面 公 同 三 已 老 从 动 两 长 知 民 样 现 分 将 外 但 身 些 与 高 意 进 把 法 此 实 回 二\n"
      "理 美 点 月 明 其 种 声 全 工 己 话 儿 者 向 情 部 正 名 定 女 问 力 机 给 等 几 很 业 最\n"
      "间 新 什 打 便 位 因 重 被 走 电 四 第 门 相 次 东 政 海 口 使 教 西 再 平 真 听 世 器 却\n"
      "队 形 量 张 认 难 水 五 六 七 八 九 百 千 万 山 石 田 土 木 火 金 车 马 牛 羊 鸟 鱼 虫 花\n"
      "草 树 林 森 雨 雪 风 云 雷 冰 春 夏 秋 冬 早 晚 午 夜 光 色 红 黄 蓝 绿 白 黑 灰 紫 城 市\n"
      "乡 村 路 桥 河 江 湖 海 岛 湾 房 屋 窗 床 桌 椅 笔 纸 书 画 音 乐 歌 舞 戏 影 诗 词 语 字\n"
      "读 写 算 数 学 校 班 课 师 友 父 母 兄 弟 姐 妹 爷 奶 叔 姨 孩 童 男 朋 亲 族 邻 客 主 宾\n"
      "吃 喝 睡 醒 坐 站 跑 跳 飞 游 爬 停 吹 拉 推 抬 抱 背 扛 提 拿 放 丢 捡 扔 接 传 递 收 寄\n"
      "买 卖 换 借 还 送 赠 付 取 存 春 贵 贱 便 宜 好 坏 新 旧 多 少 快 慢 高 低 长 短 宽 窄 厚\n"
      "薄 深 浅 远 近 冷 热 温 凉 干 湿 亮 暗 轻 重 软 硬 甜 酸 苦 辣 咸 香 臭 鲜 嫩 脆 滑 粗 细\n"
      "己 已 巳 未 末 士 曰 入 太 犬 王 玉 干 千 于 夫 由 甲 申 目 刀 刃 今 令 少 贝 乌 几 丸 厂\n"
      "广 斤 斥 史 吏 免 兔 折 拆 住 往 爪 瓜 戊 戌 戍 旦 白 百 自 早 旧 叶 古 右 左 布 有 友 灰\n";
}

inline const char* embedded_near_form_groups() {
  return
      "己 已 巳\n"
      "未 末\n"
      "土 士\n"
      "日 曰\n"
      "人 入\n"
      "大 太 犬\n"
      "王 玉\n"
      "干 千 于\n"
      "天 夫\n"
      "田 由 甲 申\n"
      "目 自\n"
      "木 本\n"
      "刀 刃\n"
      "今 令\n"
      "午 牛\n"
      "少 小\n"
      "贝 见\n"
      "乌 鸟\n"
      "儿 几\n"
      "九 丸\n"
      "厂 广\n"
      "斤 斥\n"
      "史 吏\n"
      "免 兔\n"
      "折 拆\n"
      "住 往\n"
      "爪 瓜\n"
      "戊 戌 戍\n";
}

// --- Icon synthesis ----------------------------------------------------------

namespace icondetail {

struct ShapeDef {
  std::string name;
  std::function<bool(double, double)> inside;  // normalized coords in [-1, 1]
};

inline double wrap_angle(double a) {
  const double two_pi = 2.0 * M_PI;
  a = std::fmod(a, two_pi);
  return a < 0 ? a + two_pi : a;
}

inline bool in_polygon(double u, double v, int k, double rot, double radius) {
  const double r = std::hypot(u, v);
  if (r < 1e-9) return true;
  const double sector = 2.0 * M_PI / k;
  const double theta = wrap_angle(std::atan2(v, u) + rot);
  const double local = std::fmod(theta, sector) - sector / 2.0;
  return r * std::cos(local) <= radius * std::cos(sector / 2.0);
}

inline bool in_star(double u, double v, int k, double outer, double inner) {
  const double r = std::hypot(u, v);
  const double sector = M_PI / k;
  const double theta = wrap_angle(std::atan2(v, u) + M_PI / 2.0);
  const double local = std::abs(std::fmod(theta, 2.0 * sector) - sector) / sector;  // 0 valley, 1 spike
  return r <= inner + (outer - inner) * local;
}

inline std::vector<ShapeDef> shape_catalog() {
  std::vector<ShapeDef> shapes;
  auto add = [&](std::string name, std::function<bool(double, double)> f) {
    shapes.push_back({std::move(name), std::move(f)});
  };

  add("disc", [](double u, double v) { return u * u + v * v <= 0.72 * 0.72; });
  add("ring", [](double u, double v) {
    const double r = std::hypot(u, v);
    return r >= 0.45 && r <= 0.74;
  });
  add("ring_thin", [](double u, double v) {
    const double r = std::hypot(u, v);
    return r >= 0.58 && r <= 0.74;
  });
  add("target", [](double u, double v) {
    const double r = std::hypot(u, v);
    return r <= 0.28 || (r >= 0.52 && r <= 0.74);
  });
  for (int k = 3; k <= 9; ++k)
    add("poly" + std::to_string(k),
        [k](double u, double v) { return in_polygon(u, v, k, -M_PI / 2.0, 0.78); });
  for (int k = 3; k <= 5; ++k)
    add("poly" + std::to_string(k) + "_rot",
        [k](double u, double v) { return in_polygon(u, v, k, M_PI / k - M_PI / 2.0, 0.78); });
  for (int k = 4; k <= 9; ++k)
    add("star" + std::to_string(k),
        [k](double u, double v) { return in_star(u, v, k, 0.85, 0.34); });
  add("cross_plus", [](double u, double v) {
    return (std::abs(u) <= 0.22 && std::abs(v) <= 0.8) || (std::abs(v) <= 0.22 && std::abs(u) <= 0.8);
  });
  add("cross_x", [](double u, double v) {
    const double a = (u + v) * M_SQRT1_2, b = (u - v) * M_SQRT1_2;
    return (std::abs(a) <= 0.2 && std::abs(b) <= 0.8) || (std::abs(b) <= 0.2 && std::abs(a) <= 0.8);
  });
  add("diamond", [](double u, double v) { return std::abs(u) + std::abs(v) <= 0.85; });
  add("diamond_ring", [](double u, double v) {
    const double m = std::abs(u) + std::abs(v);
    return m >= 0.5 && m <= 0.85;
  });
  add("square", [](double u, double v) { return std::max(std::abs(u), std::abs(v)) <= 0.62; });
  add("square_ring", [](double u, double v) {
    const double m = std::max(std::abs(u), std::abs(v));
    return m >= 0.4 && m <= 0.64;
  });
  const struct {
    const char* name;
    double dx, dy;
  } dirs[4] = {{"up", 0, -1}, {"down", 0, 1}, {"left", -1, 0}, {"right", 1, 0}};
  for (const auto& d : dirs) {
    const double dx = d.dx, dy = d.dy;
    add(std::string("arrow_") + d.name, [dx, dy](double u, double v) {
      // rotate so the arrow points along +x
      const double x = u * dx + v * dy;
      const double y = -u * dy + v * dx;
      const bool head = x >= 0.05 && x <= 0.8 && std::abs(y) <= (0.8 - x);
      const bool shaft = x >= -0.8 && x <= 0.15 && std::abs(y) <= 0.2;
      return head || shaft;
    });
    add(std::string("half_") + d.name, [dx, dy](double u, double v) {
      const double x = u * dx + v * dy;
      return u * u + v * v <= 0.72 * 0.72 && x >= 0;
    });
    add(std::string("corner_") + d.name, [dx, dy](double u, double v) {
      const double x = u * dx + v * dy;
      const double y = -u * dy + v * dx;
      return std::max(std::abs(u), std::abs(v)) <= 0.72 && (x >= 0.2 || y >= 0.2);
    });
  }
  for (int k = 2; k <= 6; ++k)
    add("bars" + std::to_string(k), [k](double u, double v) {
      const double span = 1.5;
      const double w = span / (2.0 * k - 1);
      const double x = u + 0.75;
      const int slot = static_cast<int>(std::floor(x / w));
      if (x < 0 || x > span || slot % 2 != 0) return false;
      const int bar = slot / 2;
      const double height = 0.5 + 0.9 * (bar + 1.0) / k;
      return v >= 0.75 - height && v <= 0.75;
    });
  for (int k = 2; k <= 6; ++k)
    add("dots" + std::to_string(k), [k](double u, double v) {
      const double w = 1.6 / k;
      const double r = std::min(0.55 * w / 2.0 + 0.12, 0.26);
      for (int i = 0; i < k; ++i) {
        const double cx = -0.8 + w * (i + 0.5);
        const double cy = (i % 2 == 0) ? -0.25 : 0.25;
        if ((u - cx) * (u - cx) + (v - cy) * (v - cy) <= r * r) return true;
      }
      return false;
    });
  add("crescent_l", [](double u, double v) {
    return u * u + v * v <= 0.74 * 0.74 && (u - 0.34) * (u - 0.34) + v * v > 0.6 * 0.6;
  });
  add("crescent_r", [](double u, double v) {
    return u * u + v * v <= 0.74 * 0.74 && (u + 0.34) * (u + 0.34) + v * v > 0.6 * 0.6;
  });
  add("checker2", [](double u, double v) {
    if (std::max(std::abs(u), std::abs(v)) > 0.72) return false;
    const int cx = u >= 0 ? 1 : 0, cy = v >= 0 ? 1 : 0;
    return (cx + cy) % 2 == 0;
  });
  add("hbar", [](double u, double v) { return std::abs(v) <= 0.26 && std::abs(u) <= 0.8; });
  add("vbar", [](double u, double v) { return std::abs(u) <= 0.26 && std::abs(v) <= 0.8; });
  add("tbar", [](double u, double v) {
    return (v <= -0.3 && v >= -0.74 && std::abs(u) <= 0.78) || (std::abs(u) <= 0.22 && v <= 0.78 && v >= -0.3);
  });
  add("wedge", [](double u, double v) { return v >= -0.7 && v <= 0.7 && u >= -0.7 && u <= 0.7 - 1.4 * ((v + 0.7) / 1.4); });
  return shapes;
}

inline ImageRgba rasterize_icon(const ShapeDef& shape, Rgb color, int side) {
  ImageRgba img(side, side);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) {
      int hits = 0;
      for (int sy = 0; sy < 3; ++sy)
        for (int sx = 0; sx < 3; ++sx) {
          const double u = ((x + (sx + 0.5) / 3.0) / side) * 2.0 - 1.0;
          const double v = ((y + (sy + 0.5) / 3.0) / side) * 2.0 - 1.0;
          if (shape.inside(u, v)) ++hits;
        }
      if (hits)
        img.set(x, y, color.r, color.g, color.b, static_cast<std::uint8_t>(hits * 255 / 9));
    }
  return img;
}

}  // namespace icondetail

// Writes icons/*.png plus icons.tsv. Each catalog shape yields a monochrome
// (black, tintable) entry and a colored one.
inline void write_icon_pool(const fs::path& dir, int icon_side = 64) {
  fs::create_directories(dir);
  std::ofstream tsv(dir / "icons.tsv", std::ios::trunc);
  if (!tsv) throw std::runtime_error("cannot write icons.tsv in " + dir.string());
  const auto catalog = icondetail::shape_catalog();
  int palette_cursor = 0;
  for (const auto& shape : catalog) {
    {
      const std::string file = shape.name + ".png";
      write_png(dir / file, icondetail::rasterize_icon(shape, {0, 0, 0}, icon_side));
      tsv << shape.name << "\t" << file << "\t1\n";
    }
    {
      const Rgb c = tint_palette()[static_cast<std::size_t>(palette_cursor++) % tint_palette().size()];
      const std::string id = shape.name + "_c";
      const std::string file = id + ".png";
      write_png(dir / file, icondetail::rasterize_icon(shape, c, icon_side));
      tsv << id << "\t" << file << "\t0\n";
    }
  }
}

// --- Scene synthesis ----------------------------------------------------------

namespace scenedetail {

inline const std::array<const char*, 12>& categories() {
  static const std::array<const char*, 12> cats = {
      "sunset", "ocean", "forest", "city",   "desert", "meadow",
      "mountain", "night", "beach", "river", "garden", "abstract"};
  return cats;
}

struct ScenePalette {
  Rgb sky_top, sky_bottom, ground, accent;
};

inline ScenePalette palette_for(int category) {
  static const std::array<ScenePalette, 12> palettes = {{
      {{250, 160, 90}, {255, 210, 130}, {120, 70, 60}, {255, 240, 200}},   // sunset
      {{90, 150, 210}, {140, 200, 235}, {30, 90, 150}, {240, 245, 250}},   // ocean
      {{150, 200, 170}, {200, 230, 200}, {40, 110, 60}, {90, 60, 30}},     // forest
      {{170, 180, 200}, {210, 215, 225}, {70, 75, 95}, {240, 220, 120}},   // city
      {{240, 200, 140}, {250, 230, 180}, {200, 150, 90}, {140, 100, 60}},  // desert
      {{160, 210, 230}, {210, 240, 245}, {110, 180, 80}, {230, 230, 90}},  // meadow
      {{150, 170, 210}, {210, 220, 240}, {110, 110, 130}, {245, 245, 250}},// mountain
      {{25, 30, 70}, {60, 70, 120}, {15, 20, 40}, {230, 230, 180}},        // night
      {{120, 190, 225}, {180, 225, 245}, {230, 210, 160}, {60, 130, 180}}, // beach
      {{140, 190, 200}, {190, 225, 230}, {70, 130, 150}, {120, 180, 110}}, // river
      {{190, 225, 190}, {230, 245, 225}, {90, 150, 80}, {220, 120 ,150}},  // garden
      {{180, 120, 200}, {230, 180, 220}, {90, 60, 140}, {250, 220, 90}},   // abstract
  }};
  return palettes[static_cast<std::size_t>(category) % palettes.size()];
}

inline Rgb lerp(Rgb a, Rgb b, double t) {
  auto mixc = [t](std::uint8_t x, std::uint8_t y) {
    return static_cast<std::uint8_t>(std::lround(x + (y - x) * t));
  };
  return {mixc(a.r, b.r), mixc(a.g, b.g), mixc(a.b, b.b)};
}

// Bilinear value noise on an integer lattice keyed by `seed`.
inline double value_noise(std::uint64_t seed, double x, double y, double wavelength) {
  const double gx = x / wavelength, gy = y / wavelength;
  const std::int64_t ix = static_cast<std::int64_t>(std::floor(gx));
  const std::int64_t iy = static_cast<std::int64_t>(std::floor(gy));
  const double fx = gx - ix, fy = gy - iy;
  auto lattice = [&](std::int64_t lx, std::int64_t ly) {
    const std::uint64_t h = mix64(seed, (static_cast<std::uint64_t>(lx) << 32) ^
                                            (static_cast<std::uint64_t>(ly) & 0xffffffffULL));
    return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  };
  const double sx = fx * fx * (3 - 2 * fx), sy = fy * fy * (3 - 2 * fy);
  const double top = lattice(ix, iy) * (1 - sx) + lattice(ix + 1, iy) * sx;
  const double bottom = lattice(ix, iy + 1) * (1 - sx) + lattice(ix + 1, iy + 1) * sx;
  return top * (1 - sy) + bottom * sy;
}

inline Image synthesize_scene(std::uint64_t seed, int index, int side) {
  RandomStream rs(mix64(seed, static_cast<std::uint64_t>(index)));
  const int category = index % static_cast<int>(categories().size());
  const ScenePalette pal = palette_for(category);
  const std::uint64_t noise_key = rs.next_u64();
  const double horizon = 0.45 + rs.next_unit() * 0.25;

  Image img(side, side);
  for (int y = 0; y < side; ++y) {
    const double t = static_cast<double>(y) / side;
    const Rgb sky = lerp(pal.sky_top, pal.sky_bottom, std::min(1.0, t / horizon));
    const Rgb row = t < horizon ? sky : lerp(pal.ground, pal.sky_bottom, (1.0 - t) * 0.4);
    for (int x = 0; x < side; ++x) img.set(x, y, row);
  }

  // celestial disc
  {
    const int cx = static_cast<int>(rs.next_below(static_cast<std::uint64_t>(side)));
    const int cy = static_cast<int>(side * horizon * (0.2 + rs.next_unit() * 0.5));
    const int radius = side / 12 + static_cast<int>(rs.next_below(static_cast<std::uint64_t>(side / 10)));
    for (int y = std::max(0, cy - radius); y < std::min(side, cy + radius + 1); ++y)
      for (int x = std::max(0, cx - radius); x < std::min(side, cx + radius + 1); ++x) {
        const double d = std::hypot(x - cx + 0.5, y - cy + 0.5);
        if (d <= radius) img.set(x, y, lerp(img.at(x, y), pal.accent, std::min(1.0, radius - d)));
      }
  }

  // skyline / ridge silhouettes above the horizon line
  const int ridges = 2 + static_cast<int>(rs.next_below(3));
  for (int ridge = 0; ridge < ridges; ++ridge) {
    const std::uint64_t rkey = rs.next_u64();
    const double base = horizon * side + ridge * side * 0.05;
    const double amp = side * (0.03 + rs.next_unit() * 0.1);
    const double wavelength = side * (0.08 + rs.next_unit() * 0.3);
    const Rgb shade = lerp(pal.ground, pal.sky_top, 0.15 * (ridges - ridge));
    for (int x = 0; x < side; ++x) {
      const double ycut = base - std::abs(value_noise(rkey, x, 0.0, wavelength)) * amp * 3.0;
      for (int y = std::max(0, static_cast<int>(ycut)); y < std::min(side, static_cast<int>(base + amp)); ++y)
        img.set(x, y, lerp(img.at(x, y), shade, 0.85));
    }
  }

  // scattered blocks/foliage below the horizon
  const int blobs = 3 + static_cast<int>(rs.next_below(5));
  for (int b = 0; b < blobs; ++b) {
    const int w = side / 16 + static_cast<int>(rs.next_below(static_cast<std::uint64_t>(side / 6)));
    const int h = side / 16 + static_cast<int>(rs.next_below(static_cast<std::uint64_t>(side / 6)));
    const int x0 = static_cast<int>(rs.next_below(static_cast<std::uint64_t>(std::max(1, side - w))));
    const int y0 = static_cast<int>(side * horizon + rs.next_below(static_cast<std::uint64_t>(
                                                        std::max(1, static_cast<int>(side * (1 - horizon)) - h))));
    const Rgb c = lerp(pal.accent, pal.ground, rs.next_unit());
    for (int y = y0; y < std::min(side, y0 + h); ++y)
      for (int x = x0; x < std::min(side, x0 + w); ++x) img.set(x, y, lerp(img.at(x, y), c, 0.8));
  }

  // texture: coarse undulation plus fine grain (keeps local distortions
  // like blur detectable everywhere)
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) {
      const double coarse = value_noise(noise_key, x, y, 48.0) * 10.0;
      const double fine = value_noise(noise_key ^ 0x9e37ULL, x, y, 4.0) * 8.0;
      const int d = static_cast<int>(std::lround(coarse + fine));
      Rgb c = img.at(x, y);
      c.r = static_cast<std::uint8_t>(std::clamp(int(c.r) + d, 0, 255));
      c.g = static_cast<std::uint8_t>(std::clamp(int(c.g) + d, 0, 255));
      c.b = static_cast<std::uint8_t>(std::clamp(int(c.b) + d, 0, 255));
      img.set(x, y, c);
    }
  return img;
}

}  // namespace scenedetail

// Writes images/*.png, images.tsv (id, file, category, caption) and
// captions.tsv (id, caption).
inline void write_image_pool(const fs::path& dir, int count, std::uint64_t seed, int side = 1024) {
  fs::create_directories(dir);
  std::ofstream tsv(dir / "images.tsv", std::ios::trunc);
  std::ofstream captions(dir / "captions.tsv", std::ios::trunc);
  if (!tsv || !captions) throw std::runtime_error("cannot write image pool manifests in " + dir.string());
  for (int i = 0; i < count; ++i) {
    const std::string category = scenedetail::categories()[static_cast<std::size_t>(i) %
                                                           scenedetail::categories().size()];
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "scene%03d", i);
    const std::string id = idbuf;
    const std::string file = id + ".png";
    write_png(dir / file, scenedetail::synthesize_scene(seed, i, side), 3);
    const std::string caption =
        "a procedurally generated " + category + " scene, variant " + std::to_string(i);
    tsv << id << "\t" << file << "\t" << category << "\t" << caption << "\n";
    captions << id << "\t" << caption << "\n";
  }
}

inline void write_word_list(const fs::path& file) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write word list: " + file.string());
  std::istringstream in(embedded_words());
  std::string word;
  while (in >> word) out << word << "\n";
}

inline void write_hanzi_lists(const fs::path& list_file, const fs::path& near_form_file) {
  {
    std::ofstream out(list_file, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write hanzi list: " + list_file.string());
    std::istringstream in(embedded_hanzi());
    std::string ch;
    while (in >> ch) out << ch << "\n";
  }
  {
    std::ofstream out(near_form_file, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write near-form list: " + near_form_file.string());
    out << embedded_near_form_groups();
  }
}

struct SamplePoolPaths {
  fs::path icons_dir;
  fs::path hanzi_file;
  fs::path near_form_file;
  fs::path words_file;
  fs::path images_dir;
  fs::path captions_file;
};

// Materializes the full desk-scale pool set under `root`.
inline SamplePoolPaths write_all(const fs::path& root, std::uint64_t seed, int image_count = 60,
                                 int image_side = 1024) {
  SamplePoolPaths paths;
  paths.icons_dir = root / "icons";
  paths.hanzi_file = root / "hanzi.txt";
  paths.near_form_file = root / "hanzi_nearform.txt";
  paths.words_file = root / "words.txt";
  paths.images_dir = root / "images";
  paths.captions_file = root / "images" / "captions.tsv";
  fs::create_directories(root);
  write_icon_pool(paths.icons_dir);
  write_hanzi_lists(paths.hanzi_file, paths.near_form_file);
  write_word_list(paths.words_file);
  write_image_pool(paths.images_dir, image_count, seed, image_side);
  return paths;
}

}  // namespace pzl::poolgen

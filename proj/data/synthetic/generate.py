"""Generates the bundled offline corpus, model script and fact-check fixtures.

Run once; the outputs are committed and the golden metrics depend on them.
"""
import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent

# (topic fact, [(claim, label), (claim, label)])
TOPICS = [
    ("The Federal Reserve raised the federal funds target by 0.25 points at its July 2023 meeting.",
     [("The Federal Reserve raised its benchmark interest rate by 0.25 percentage points in July 2023", "true"),
      ("The Federal Reserve raised its benchmark interest rate by 0.75 percentage points in July 2023", "false")]),
    ("Apple's market value first crossed 3 trillion dollars on January 3, 2022.",
     [("Apple became the first public company to reach a 3 trillion dollar market value in January 2022", "true"),
      ("Apple reached a market value of 3 trillion dollars for the first time in January 2022", "true")]),
    ("Trustee reports project reserve depletion in the 2030s, after which payroll taxes still fund most benefits.",
     [("Social Security will run out of money completely by 2025", "false"),
      ("The Social Security trust fund will be fully depleted in 2025 leaving no benefits", "false")]),
    ("Federal relief programs covered federal loans only; private student loans were not forgiven.",
     [("A secret federal program forgave all private student loans in 2023", "false"),
      ("The federal government quietly cancelled every private student loan in 2023", "false")]),
    ("El Salvador's Bitcoin Law took effect on September 7, 2021.",
     [("Bitcoin was declared legal tender in El Salvador in 2021", "true"),
      ("El Salvador adopted Bitcoin as legal tender in September 2021", "true")]),
    ("The consumer price index rose 9.1 percent year over year in June 2022.",
     [("Consumer price inflation in the United States peaked at 9.1 percent in June 2022", "true"),
      ("US consumer price inflation peaked at 12 percent in June 2022", "false")]),
    ("The national average for regular gasoline passed 5 dollars a gallon in June 2022.",
     [("The average US gasoline price exceeded 5 dollars per gallon in June 2022", "true"),
      ("A new federal tax will double gasoline prices next month in every state", "nei")]),
    ("No filing or announcement describes an exit from European car sales.",
     [("Tesla will stop selling cars in Europe by the end of the year", "nei"),
      ("Tesla announced it will stop selling cars in Europe by year end", "nei")]),
    ("Regulators closed Silicon Valley Bank on March 10, 2023 after depositors withdrew 42 billion dollars.",
     [("Silicon Valley Bank collapsed in March 2023 after a run on deposits", "true"),
      ("Silicon Valley Bank collapsed in March 2023 because of a cyber attack", "false")]),
    ("The federal minimum wage has been 7.25 dollars an hour since 2009.",
     [("The federal minimum wage was raised to 15 dollars an hour in 2021", "false"),
      ("Congress raised the federal minimum wage to 15 dollars per hour in 2021", "false")]),
    ("No further economic impact payments were authorized after 2021.",
     [("Every American adult will receive a 2000 dollar stimulus check next month", "false"),
      ("A fourth stimulus check of 2000 dollars is coming for every adult next month", "false")]),
    ("Forecasts for national home prices vary widely and none is authoritative.",
     [("Home prices in the United States will fall by half within a year", "nei"),
      ("Analysts say US home prices will drop 50 percent within twelve months", "nei")]),
    ("Saudi Arabia announced a voluntary cut of one million barrels per day starting July 2023.",
     [("Saudi Arabia cut oil production by one million barrels per day in July 2023", "true"),
      ("Saudi Arabia increased oil production by one million barrels per day in July 2023", "false")]),
    ("The jobs report for January 2023 showed unemployment at 3.4 percent.",
     [("The US unemployment rate fell to 3.4 percent in January 2023", "true"),
      ("The US unemployment rate will fall to 3 percent in January next year", "nei")]),
    ("Merger rumors between large banks circulate often and are rarely confirmed in advance.",
     [("A major bank is planning to merge with a rival next quarter", "nei"),
      ("Two major banks are in secret merger talks for next quarter", "nei")]),
    ("Payment apps issue 1099-K forms for business payments; personal transfers are not audited wholesale.",
     [("The IRS will audit every Venmo transaction above 600 dollars", "false"),
      ("Payment apps must report business payments above 600 dollars to the IRS", "true")]),
    ("The Fiscal Responsibility Act suspended the debt limit on June 3, 2023.",
     [("The United States defaulted on its national debt in June 2023", "false"),
      ("The US government avoided default after the debt ceiling was suspended in June 2023", "true")]),
    ("Amazon has not published a nationwide rollout plan for cashierless grocery stores.",
     [("Amazon plans to open cashier-less grocery stores in every US city next year", "nei"),
      ("Amazon will open cashierless grocery stores in every city in the US next year", "nei")]),
    ("Some bureaus accept rent payment history; soft inquiries do not affect scores.",
     [("Paying rent on time can now raise credit scores at some bureaus", "true"),
      ("Credit bureaus will stop counting all medical debt next year", "nei")]),
    ("Nvidia closed 2023 up about 239 percent.",
     [("Nvidia shares rose more than 200 percent in 2023", "true"),
      ("Nvidia stock rose over 200 percent during 2023", "true")]),
    ("The Federal Reserve has made no decision to issue a central bank digital currency.",
     [("The Federal Reserve is preparing to launch a digital dollar", "nei"),
      ("A digital dollar from the Federal Reserve will replace paper cash soon", "nei")]),
    ("No public filing shows a pension fund losing that share of assets in a week.",
     [("A pension fund lost 40 percent of its value in one week", "nei"),
      ("State pension fund reported losing 40 percent in a single week", "nei")]),
    ("Croatia joined the euro area on January 1, 2023.",
     [("Croatia adopted the euro as its currency in January 2023", "true"),
      ("Croatia adopted the euro in January 2021", "false")]),
    ("Deposit rates depend on future policy decisions that have not been made.",
     [("Savings accounts will pay 10 percent interest by next summer", "nei"),
      ("Banks promise 10 percent interest on savings accounts next summer", "nei")]),
    ("The acquisition of Twitter closed on October 27, 2022 at about 44 billion dollars.",
     [("Elon Musk completed the purchase of Twitter for 44 billion dollars in October 2022", "true"),
      ("Elon Musk bought Twitter for 44 million dollars in October 2022", "false")]),
    ("Utility rate filings for this winter are still under review.",
     [("Electricity bills will triple for all households this winter", "nei"),
      ("All household electricity bills are set to triple this winter", "nei")]),
    ("In 2022 US nominal GDP was about 25 trillion dollars against about 18 trillion for China.",
     [("China overtook the United States as the world's largest economy in 2022", "false"),
      ("China became the world's largest economy by nominal GDP in 2022", "false")]),
    ("The CHIPS and Science Act appropriates roughly 52.7 billion dollars for semiconductor programs.",
     [("The CHIPS Act provides about 52 billion dollars for US semiconductor manufacturing", "true"),
      ("The CHIPS Act gives 52 billion dollars to semiconductor makers in the United States", "true")]),
    ("No federal statute bans retailers from accepting cash.",
     [("Stores in the US will be banned from accepting cash starting next year", "false"),
      ("A federal law will ban cash payments in US stores from next year", "false")]),
    ("FTX filed for Chapter 11 protection on November 11, 2022.",
     [("FTX filed for bankruptcy in November 2022", "true"),
      ("A large crypto exchange may file for bankruptcy next month", "nei")]),
]

VERDICT_SENTENCE = {
    "true": "Primary records support the statement.",
    "false": "Primary records contradict the statement.",
    "nei": "No reliable source confirms or refutes the statement.",
}

PUBLISHERS = ["PolitiFact", "FactCheck.org", "Reuters Fact Check", "AP Fact Check", "Snopes"]
RATINGS = {
    "true": ["True", "Mostly True", "Correct"],
    "false": ["False", "Mostly False", "Pants on Fire!", "Misleading"],
    "nei": ["Unproven", "Mixture", "Needs Context"],
}
LABELS = ["true", "false", "nei"]

MODEL_SKILL = {"rag_model_1": 0.8, "rag_model_2": 0.65, "factcheck_analyzer": 0.6}


def fence(obj):
    return "```json\n" + json.dumps(obj) + "\n```"


def main():
    rng = random.Random(20240917)
    records = []
    for t, (fact, claims) in enumerate(TOPICS):
        for j, (claim, label) in enumerate(claims):
            n = len(records)
            rid = f"syn-{n + 1:03d}"
            evidence = [fact, VERDICT_SENTENCE[label]]
            if rid == "syn-017":
                evidence = []
            records.append({
                "id": rid,
                "claim": claim,
                "label": label,
                "evidence": evidence,
                "sources": [f"https://records.example.org/topic-{t + 1:02d}/{j + 1}"],
                "author": f"desk-{(n % 4) + 1}",
                "posted": f"2023-{(n % 12) + 1:02d}-{(n % 27) + 1:02d}",
            })

    counts = {l: sum(r["label"] == l for r in records) for l in LABELS}
    assert len(records) == 60 and counts == {"true": 20, "false": 20, "nei": 20}, counts

    rules = []
    for r in records:
        for model, skill in MODEL_SKILL.items():
            gold = r["label"]
            label = gold if rng.random() < skill else rng.choice([l for l in LABELS if l != gold])
            conf = round(rng.uniform(0.55, 0.95) if label == gold else rng.uniform(0.35, 0.8), 2)
            if label == "nei" and rng.random() < 0.3:
                conf = 0.0
            reply = {"label": label,
                     "evidence": f"{model} assessment: {VERDICT_SENTENCE[label]}",
                     "confidence": conf}
            if model != "factcheck_analyzer":
                reply["used_context"] = rng.random() < 0.7
            rule = {"model": model, "contains": "Claim:\n" + r["claim"] + "\n"}
            if model == "rag_model_2" and r["id"] in ("syn-004", "syn-040"):
                rule["responses"] = ["I think this is probably false.", fence(reply)]
            else:
                rule["response"] = fence(reply)
            rules.append(rule)
    script = {
        "default": fence({"label": "nei", "evidence": "", "confidence": 0.0}),
        "rules": rules,
    }

    responses = []
    for i, r in enumerate(records):
        if i % 3 != 0:
            continue
        if r["id"] in ("syn-007", "syn-046"):
            responses.append({"query": r["claim"], "status": 429, "body": {"error": "quota"}})
            continue
        if r["id"] == "syn-025":
            responses.append({"query": r["claim"], "status": 200, "body": "{\"claims\": [ {\"text\": "})
            continue
        gold = r["label"]
        rating_label = gold if rng.random() < 0.9 else rng.choice([l for l in LABELS if l != gold])
        publisher = rng.choice(PUBLISHERS)
        responses.append({
            "query": r["claim"],
            "status": 200,
            "body": {"claims": [{
                "text": r["claim"],
                "claimant": "social media post",
                "claimReview": [{
                    "publisher": {"name": publisher, "site": publisher.lower().replace(" ", "") + ".example"},
                    "url": f"https://factchecks.example.org/{r['id']}",
                    "title": r["claim"],
                    "reviewDate": r["posted"] + "T00:00:00Z",
                    "textualRating": rng.choice(RATINGS[rating_label]),
                    "languageCode": "en",
                }],
            }]},
        })
    fixtures = {"responses": responses, "default": {"status": 200, "body": {}}}

    run = {
        "variant": "full",
        "corpus": "corpus.json",
        "split": {"train_fraction": 0.85, "seed": 42},
        "output_dir": "out",
        "traces": True,
        "settings": {
            "providers": {"llm": "mock:llm_script.json", "factcheck": "mock:factcheck_fixtures.json"},
            "runtime": {"workers": 4},
        },
    }

    def dump(name, obj):
        (HERE / name).write_text(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")

    dump("corpus.json", records)
    dump("llm_script.json", script)
    dump("factcheck_fixtures.json", fixtures)
    dump("run_config.json", run)
    print(counts, "matched fixtures:", len(responses))


if __name__ == "__main__":
    main()

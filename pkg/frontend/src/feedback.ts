// Six-metric Likert feedback widget: state, request body construction and
// the star-row renderer. Out-of-range values are unrepresentable: ratings
// only enter through rate(), which accepts the 1..5 star positions.

import { METRIC_LABELS, METRICS, type MetricName } from "./types.js";
import { escapeHtml } from "./render.js";

export type Ratings = Partial<Record<MetricName, number>>;

export function rate(ratings: Ratings, metric: MetricName, stars: number): Ratings {
  if (!Number.isInteger(stars) || stars < 1 || stars > 5) {
    return ratings; // widget stars are 1..5; anything else is ignored
  }
  if (!METRICS.includes(metric)) {
    return ratings;
  }
  return { ...ratings, [metric]: stars };
}

/** The POST body: only the metrics the user actually rated. */
export function buildFeedbackBody(
  ratings: Ratings,
  freeText?: string
): { ratings: Record<string, number>; free_text?: string } {
  const rated: Record<string, number> = {};
  for (const metric of METRICS) {
    const value = ratings[metric];
    if (value !== undefined) {
      rated[metric] = value;
    }
  }
  const body: { ratings: Record<string, number>; free_text?: string } = { ratings: rated };
  if (freeText && freeText.trim()) {
    body.free_text = freeText.trim();
  }
  return body;
}

export function hasAnyRating(ratings: Ratings): boolean {
  return METRICS.some((m) => ratings[m] !== undefined);
}

export function renderFeedbackWidget(ratings: Ratings, submitted: boolean): string {
  if (submitted) {
    return `<div class="feedback-thanks">Thanks for the feedback!</div>`;
  }
  const rows = METRICS.map((metric) => {
    const current = ratings[metric] ?? 0;
    const stars = [1, 2, 3, 4, 5]
      .map(
        (n) =>
          `<button class="star${n <= current ? " star-on" : ""}" ` +
          `data-metric="${metric}" data-stars="${n}" aria-label="${n} of 5">★</button>`
      )
      .join("");
    return (
      `<div class="feedback-row" data-metric-row="${metric}">` +
      `<span class="feedback-label">${escapeHtml(METRIC_LABELS[metric])}</span>` +
      `<span class="feedback-stars">${stars}</span></div>`
    );
  }).join("");
  return (
    `<div class="feedback-widget">` +
    `<h3>Rate this tutor</h3>${rows}` +
    `<textarea class="feedback-text" placeholder="Anything else? (optional)"></textarea>` +
    `<button class="feedback-submit" data-action="submit-feedback">Send feedback</button>` +
    `</div>`
  );
}

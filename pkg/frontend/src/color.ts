/** Diverging saliency colormap with its midpoint at zero.
 *
 * Scores arrive normalized to [-1, 1]. Zero maps to white (neutral);
 * positive scores blend toward red, negative toward blue, with the
 * magnitude driving the blend so the sentence's top word (|score| = 1)
 * is the most intensely shaded.
 */

const POSITIVE: [number, number, number] = [178, 24, 43];
const NEGATIVE: [number, number, number] = [33, 102, 172];
const NEUTRAL: [number, number, number] = [255, 255, 255];

export function saliencyColor(score: number): string {
  const clamped = Math.max(-1, Math.min(1, score));
  const target = clamped >= 0 ? POSITIVE : NEGATIVE;
  const t = Math.abs(clamped);
  const channel = (i: number) => Math.round(NEUTRAL[i] + (target[i] - NEUTRAL[i]) * t);
  return `rgb(${channel(0)}, ${channel(1)}, ${channel(2)})`;
}

/** Dark text stays readable on pale shades; switch to white on deep ones. */
export function saliencyTextColor(score: number): string {
  return Math.abs(score) > 0.6 ? "#ffffff" : "#1a1a1a";
}

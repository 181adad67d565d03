import { ApiClient } from './api';
import { ReviewApp } from './ui';

const root = document.getElementById('app');
if (!root) {
  throw new Error('missing #app container');
}
const app = new ReviewApp(root, new ApiClient());
void app.start();

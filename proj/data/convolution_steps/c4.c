const int H = 16;
const int W = 16;
const int K = 3;
const int OH = 14;
const int OW = 14;

void convolution(int input_image[256], int kernel[9], int output_image[196])
{
    int i;
    int j;
    int ki;
    int kj;
    int acc;
    int __k0;
    for (__k0 = 0; __k0 < OH * OW; __k0++) {
        int i = __k0 / OW;
        int j = __k0 % OW;
        acc = 0;
        for (ki = 0; ki < K; ki++) {
            for (kj = 0; kj < K; kj++) {
                acc += input_image[(i + ki) * 16 + (j + kj)] * kernel[ki * 3 + kj];
            }
        }
        output_image[i * 14 + j] = acc;
    }
}
